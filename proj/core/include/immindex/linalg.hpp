#ifndef IMMINDEX_LINALG_HPP
#define IMMINDEX_LINALG_HPP

#include <span>
#include <utility>
#include <vector>

#include "immindex/errors.hpp"

namespace immindex {

/// Dense row-major matrix of doubles. Everything in this project is tiny
/// (at most 2n x 2n with n <= 8), so no attempt is made at sparsity or
/// expression templates.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * size_t(cols), 0.0) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return data_[size_t(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[size_t(r) * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double frobenius_norm() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// In-place LU determinant with partial pivoting of an n x n buffer
/// (row-major, contiguous). The buffer is destroyed.
double lu_determinant_inplace(double* a, int n);

/// Determinant by LU with partial pivoting.
double determinant(const Matrix& a);

/// Inverse by LU with partial pivoting. Throws RankDeficientError if a pivot
/// underflows the scaled threshold.
Matrix inverse(const Matrix& a);

/// A point of the (open, full-rank) Stiefel variety V(n,2n): a 2n x n matrix
/// of full column rank. entry(j, i) is the ambient component j of column i
/// (0-based). The rank invariant is enforced where it matters, in gram().
struct StiefelPoint {
    int n = 0;
    Matrix entries;  // 2n x n

    StiefelPoint() = default;
    StiefelPoint(int n_, Matrix m);
};

/// Strictly increasing set of n row indices drawn from {1, ..., 2n}, 1-based.
struct IndexSet {
    int n = 0;
    std::vector<int> indices;

    IndexSet() = default;
    IndexSet(int n_, std::vector<int> idx);
};

/// All C(2n, n) index sets for given n, in lexicographic order.
std::vector<IndexSet> all_index_sets(int n);

/// Complement of J inside {1, ..., 2n}, increasing.
IndexSet complement(const IndexSet& j);

/// Sign exponent mu(J) = n(n-1)/2 + j_1 + ... + j_n. Its parity carries the
/// sign (-1)^mu(J) attached to the complementary minor of J.
long sign_exponent(const IndexSet& j);

/// Determinant of the n x n submatrix of phi on the rows NOT in J, rows taken
/// in increasing order, all columns in natural order.
double complementary_minor(const StiefelPoint& phi, const IndexSet& j);

/// Determinant of the n x n submatrix of phi on the rows of J (increasing).
double row_minor(const StiefelPoint& phi, const IndexSet& j);

/// Gram data of a Stiefel point: U = phi^T phi, its inverse, det U and
/// u = (det U)^{-1/2}. det U equals the sum of squared n-th order minors of
/// phi and is positive exactly when phi has full rank.
struct GramData {
    Matrix U;      // n x n symmetric positive definite
    Matrix U_inv;  // n x n
    double det_U = 0.0;
    double u = 0.0;  // (det U)^{-1/2}
};

/// Computes GramData. Throws RankDeficientError when
/// det U < 1e-12 * (max column norm)^(2n)  (scale-invariant test).
GramData gram(const StiefelPoint& phi);

/// All n! permutations of {0, ..., n-1} with their parity signs, in
/// lexicographic order. Guarded at n <= 8; throws TooLargeError above.
std::vector<std::pair<std::vector<int>, int>> signed_permutations(int n);

}  // namespace immindex

#endif

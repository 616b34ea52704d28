#include "immindex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace immindex {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double lu_determinant_inplace(double* a, int n) {
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a[size_t(k) * n + k]);
        for (int r = k + 1; r < n; ++r) {
            double v = std::fabs(a[size_t(r) * n + k]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(a[size_t(piv) * n + c], a[size_t(k) * n + c]);
            det = -det;
        }
        const double pivot = a[size_t(k) * n + k];
        det *= pivot;
        for (int r = k + 1; r < n; ++r) {
            const double f = a[size_t(r) * n + k] / pivot;
            if (f == 0.0) continue;
            a[size_t(r) * n + k] = 0.0;
            for (int c = k + 1; c < n; ++c) a[size_t(r) * n + c] -= f * a[size_t(k) * n + c];
        }
    }
    return det;
}

double determinant(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatchError("determinant: matrix is not square");
    std::vector<double> buf(a.data(), a.data() + size_t(a.rows()) * a.cols());
    return lu_determinant_inplace(buf.data(), a.rows());
}

Matrix inverse(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatchError("inverse: matrix is not square");
    const int n = a.rows();
    // Gauss-Jordan with partial pivoting on [A | I].
    std::vector<double> w(size_t(n) * 2 * n, 0.0);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) w[size_t(r) * 2 * n + c] = a(r, c);
        w[size_t(r) * 2 * n + n + r] = 1.0;
    }
    double scale = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) scale = std::max(scale, std::fabs(a(r, c)));
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(w[size_t(k) * 2 * n + k]);
        for (int r = k + 1; r < n; ++r) {
            double v = std::fabs(w[size_t(r) * 2 * n + k]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best <= 1e-300 || best <= 1e-15 * scale)
            throw RankDeficientError("inverse: matrix is numerically singular");
        if (piv != k)
            for (int c = 0; c < 2 * n; ++c) std::swap(w[size_t(piv) * 2 * n + c], w[size_t(k) * 2 * n + c]);
        const double pivot = w[size_t(k) * 2 * n + k];
        for (int c = 0; c < 2 * n; ++c) w[size_t(k) * 2 * n + c] /= pivot;
        for (int r = 0; r < n; ++r) {
            if (r == k) continue;
            const double f = w[size_t(r) * 2 * n + k];
            if (f == 0.0) continue;
            for (int c = 0; c < 2 * n; ++c) w[size_t(r) * 2 * n + c] -= f * w[size_t(k) * 2 * n + c];
        }
    }
    Matrix out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out(r, c) = w[size_t(r) * 2 * n + n + c];
    return out;
}

StiefelPoint::StiefelPoint(int n_, Matrix m) : n(n_), entries(std::move(m)) {
    if (n < 1) throw DimensionMismatchError("StiefelPoint: n must be positive");
    if (entries.rows() != 2 * n || entries.cols() != n)
        throw DimensionMismatchError("StiefelPoint: entries must be 2n x n");
}

IndexSet::IndexSet(int n_, std::vector<int> idx) : n(n_), indices(std::move(idx)) {
    if (int(indices.size()) != n) throw DimensionMismatchError("IndexSet: needs exactly n indices");
    for (int k = 0; k < n; ++k) {
        if (indices[k] < 1 || indices[k] > 2 * n)
            throw DimensionMismatchError("IndexSet: index out of range [1, 2n]");
        if (k > 0 && indices[k] <= indices[k - 1])
            throw DimensionMismatchError("IndexSet: indices must be strictly increasing");
    }
}

std::vector<IndexSet> all_index_sets(int n) {
    std::vector<IndexSet> out;
    std::vector<int> cur(n);
    for (int k = 0; k < n; ++k) cur[k] = k + 1;
    while (true) {
        out.emplace_back(n, cur);
        int k = n - 1;
        while (k >= 0 && cur[k] == n + k + 1) --k;
        if (k < 0) break;
        ++cur[k];
        for (int l = k + 1; l < n; ++l) cur[l] = cur[l - 1] + 1;
    }
    return out;
}

IndexSet complement(const IndexSet& j) {
    std::vector<bool> in(2 * j.n + 1, false);
    for (int v : j.indices) in[v] = true;
    std::vector<int> out;
    out.reserve(j.n);
    for (int v = 1; v <= 2 * j.n; ++v)
        if (!in[v]) out.push_back(v);
    return IndexSet(j.n, std::move(out));
}

long sign_exponent(const IndexSet& j) {
    long s = long(j.n) * (j.n - 1) / 2;
    for (int v : j.indices) s += v;
    return s;
}

namespace {

double minor_on_rows(const StiefelPoint& phi, const std::vector<int>& rows1based) {
    const int n = phi.n;
    std::vector<double> buf(size_t(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) buf[size_t(r) * n + c] = phi.entries(rows1based[r] - 1, c);
    return lu_determinant_inplace(buf.data(), n);
}

}  // namespace

double complementary_minor(const StiefelPoint& phi, const IndexSet& j) {
    if (phi.n != j.n) throw DimensionMismatchError("complementary_minor: dimension mismatch");
    return minor_on_rows(phi, complement(j).indices);
}

double row_minor(const StiefelPoint& phi, const IndexSet& j) {
    if (phi.n != j.n) throw DimensionMismatchError("row_minor: dimension mismatch");
    return minor_on_rows(phi, j.indices);
}

GramData gram(const StiefelPoint& phi) {
    const int n = phi.n;
    GramData g;
    g.U = Matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < 2 * n; ++k) s += phi.entries(k, i) * phi.entries(k, j);
            g.U(i, j) = s;
            g.U(j, i) = s;
        }
    g.det_U = determinant(g.U);
    double max_col = 0.0;
    for (int i = 0; i < n; ++i) max_col = std::max(max_col, std::sqrt(g.U(i, i)));
    const double threshold = 1e-12 * std::pow(max_col, 2 * n);
    if (!(g.det_U > threshold) || !(g.det_U > 0.0))
        throw RankDeficientError("gram: matrix is rank deficient (det U below threshold)");
    g.U_inv = inverse(g.U);
    g.u = 1.0 / std::sqrt(g.det_U);
    return g;
}

std::vector<std::pair<std::vector<int>, int>> signed_permutations(int n) {
    if (n < 1) throw DimensionMismatchError("signed_permutations: n must be positive");
    if (n > 8) throw TooLargeError("signed_permutations: n exceeds the factorial guard (n <= 8)");
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) perm[k] = k;
    std::vector<std::pair<std::vector<int>, int>> out;
    do {
        int inversions = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (perm[a] > perm[b]) ++inversions;
        out.emplace_back(perm, (inversions % 2 == 0) ? +1 : -1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

}  // namespace immindex

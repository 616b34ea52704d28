#ifndef IMMINDEX_TEST_HELPERS_HPP
#define IMMINDEX_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "immindex/immersion.hpp"
#include "immindex/linalg.hpp"
#include "immindex/rng.hpp"

namespace immindex::testing {

/// Independent determinant oracle: plain permutation sum with inversion-count
/// parity. Deliberately shares nothing with the library's LU path.
inline double perm_sum_det(const Matrix& a) {
    const int n = a.rows();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    double det = 0.0;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        double prod = (inversions % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i) prod *= a(i, perm[i]);
        det += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

/// Recursive adaptive Simpson; the tests' 1-D quadrature oracle.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 30) {
    auto simpson = [&f](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
    };
    std::function<double(double, double, double, double, int)> rec =
        [&](double lo, double hi, double whole, double eps, int d) -> double {
        const double mid = 0.5 * (lo + hi);
        const double left = simpson(lo, mid);
        const double right = simpson(mid, hi);
        if (d <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, left, eps / 2.0, d - 1) + rec(mid, hi, right, eps / 2.0, d - 1);
    };
    return rec(a, b, simpson(a, b), tol, depth);
}

inline Matrix random_matrix(Rng& rng, int rows, int cols, double lo = -2.0, double hi = 2.0) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
    return m;
}

inline StiefelPoint random_stiefel(Rng& rng, int n, double det_u_min = 1e-3) {
    for (;;) {
        Matrix m = random_matrix(rng, 2 * n, n);
        try {
            StiefelPoint phi(n, m);
            if (gram(phi).det_U > det_u_min) return phi;
        } catch (const RankDeficientError&) {
        }
    }
}

inline Immersion lifted_example() { return lift(one_loop_curve(), BumpFunction(0.2, 0.8, 1.0)); }

}  // namespace immindex::testing

#endif

#include "immindex/stiefel_form.hpp"

#include <cmath>
#include <numbers>

#include "immindex/rng.hpp"

namespace immindex {

TangentVector::TangentVector(int n_, Matrix m) : n(n_), entries(std::move(m)) {
    if (n < 1) throw DimensionMismatchError("TangentVector: n must be positive");
    if (entries.rows() != 2 * n || entries.cols() != n)
        throw DimensionMismatchError("TangentVector: entries must be 2n x n");
}

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

/// -(1 / (2^{n+1} pi^{n/2} (n/2)!))
double global_constant(int n) {
    return -1.0 / (std::pow(2.0, n + 1) * std::pow(std::numbers::pi, n / 2.0) * factorial(n / 2));
}

struct OmegaTables {
    int n;
    GramData gram_data;
    std::vector<IndexSet> sets;
    std::vector<double> minors;     // complementary minors, per set
    std::vector<double> set_signs;  // (-1)^{mu(J)}
    std::vector<std::pair<std::vector<int>, int>> perms;
};

OmegaTables build_tables(const StiefelPoint& phi) {
    const int n = phi.n;
    if (n % 2 != 0) throw OddDimensionError("omega: the index form is defined for even n only");
    OmegaTables t;
    t.n = n;
    t.gram_data = gram(phi);
    t.sets = all_index_sets(n);
    t.minors.reserve(t.sets.size());
    t.set_signs.reserve(t.sets.size());
    for (const IndexSet& j : t.sets) {
        t.minors.push_back(complementary_minor(phi, j));
        t.set_signs.push_back(sign_exponent(j) % 2 == 0 ? 1.0 : -1.0);
    }
    t.perms = signed_permutations(n);
    return t;
}

FormValue omega_eval_impl(const StiefelPoint& phi, std::span<const TangentVector> tangents) {
    const int n = phi.n;
    if (int(tangents.size()) != n)
        throw DimensionMismatchError("omega_eval: expected exactly n tangent vectors");
    for (const TangentVector& t : tangents)
        if (t.n != n) throw DimensionMismatchError("omega_eval: tangent dimension mismatch");

    const OmegaTables tab = build_tables(phi);
    const double c0 = global_constant(n) * tab.gram_data.u;

    // odometer over index tuples (i_1 ... i_n), 0-based
    std::vector<int> tup(n, 0);
    double wedge[kMaxDomainDim * kMaxDomainDim];
    double sum = 0.0;
    double scale = 0.0;
    while (true) {
        double coef = 1.0;
        for (int p = 0; p + 1 < n; p += 2) coef *= tab.gram_data.U_inv(tup[p], tup[p + 1]);
        if (coef != 0.0) {
            for (const auto& [perm, perm_sign] : tab.perms) {
                (void)perm_sign;  // the sigma-sum carries no sign
                for (size_t js = 0; js < tab.sets.size(); ++js) {
                    const IndexSet& J = tab.sets[js];
                    for (int a = 0; a < n; ++a) {
                        const int row = J.indices[a] - 1;
                        const int col = tup[perm[a]];
                        for (int b = 0; b < n; ++b)
                            wedge[size_t(a) * n + b] = tangents[b].entries(row, col);
                    }
                    const double det = lu_determinant_inplace(wedge, n);
                    const double term = c0 * coef * tab.set_signs[js] * tab.minors[js] * det;
                    sum += tab.set_signs[js] * tab.minors[js] * det * coef;
                    scale = std::max(scale, std::fabs(term));
                }
            }
        }
        int k = n - 1;
        while (k >= 0 && tup[k] == n - 1) tup[k--] = 0;
        if (k < 0) break;
        ++tup[k];
    }
    return {c0 * sum, scale};
}

}  // namespace

FormValue omega_eval_detailed(const StiefelPoint& phi, std::span<const TangentVector> tangents) {
    return omega_eval_impl(phi, tangents);
}

double omega_eval(const StiefelPoint& phi, std::span<const TangentVector> tangents) {
    return omega_eval_impl(phi, tangents).value;
}

StiefelForm omega_form() {
    return [](const StiefelPoint& phi, std::span<const TangentVector> tangents) {
        return omega_eval_impl(phi, tangents);
    };
}

StiefelForm perturbed_omega_form(double epsilon) {
    return [epsilon](const StiefelPoint& phi, std::span<const TangentVector> tangents) {
        if (phi.n != 2)
            throw DimensionMismatchError("perturbed_omega_form: implemented for n = 2 only");
        FormValue base = omega_eval_impl(phi, tangents);
        // phi(2,1) dphi(1,1) ^ dphi(1,2), all indices 1-based
        const double wedge = tangents[0].entries(0, 0) * tangents[1].entries(0, 1) -
                             tangents[1].entries(0, 0) * tangents[0].entries(0, 1);
        const double term = epsilon * phi.entries(1, 0) * wedge;
        return FormValue{base.value + term, std::max(base.term_scale, std::fabs(term))};
    };
}

double integrand_pullback(const Immersion& f, const double* x) {
    const int n = f.dim();
    if (n % 2 != 0) throw OddDimensionError("integrand_pullback: n must be even");
    const int m = 2 * n;
    std::vector<double> jac(size_t(m) * n), hess(size_t(m) * n * n);
    f.jacobian(x, jac.data());
    f.hessian(x, hess.data());
    Matrix phi_m(m, n);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) phi_m(j, i) = jac[size_t(j) * n + i];
    StiefelPoint phi(n, std::move(phi_m));
    std::vector<TangentVector> tangents;
    tangents.reserve(n);
    for (int k = 0; k < n; ++k) {
        Matrix t(m, n);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) t(j, i) = hess[(size_t(j) * n + i) * n + k];
        tangents.emplace_back(n, std::move(t));
    }
    return omega_eval_impl(phi, tangents).value;
}

double integrand_direct(const Immersion& f, const double* x) {
    const int n = f.dim();
    if (n % 2 != 0) throw OddDimensionError("integrand_direct: n must be even");
    const int m = 2 * n;
    std::vector<double> jac(size_t(m) * n), hess(size_t(m) * n * n);
    f.jacobian(x, jac.data());
    f.hessian(x, hess.data());
    Matrix phi_m(m, n);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) phi_m(j, i) = jac[size_t(j) * n + i];
    const GramData g = gram(StiefelPoint(n, std::move(phi_m)));

    const auto perms = signed_permutations(n);
    std::vector<int> tup(n, 0);
    std::vector<double> stacked(size_t(m) * m);
    double sum = 0.0;
    while (true) {
        double coef = 1.0;
        for (int p = 0; p + 1 < n; p += 2) coef *= g.U_inv(tup[p], tup[p + 1]);
        if (coef != 0.0) {
            for (const auto& [perm, perm_sign] : perms) {
                (void)perm_sign;
                // rows k < n: d f_j / d x_k; rows n+k: d^2 f_j / d x_k d x_{i_sigma(k)}
                for (int k = 0; k < n; ++k) {
                    for (int j = 0; j < m; ++j) stacked[size_t(k) * m + j] = jac[size_t(j) * n + k];
                    const int is = tup[perm[k]];
                    for (int j = 0; j < m; ++j)
                        stacked[size_t(n + k) * m + j] = hess[(size_t(j) * n + k) * n + is];
                }
                sum += coef * lu_determinant_inplace(stacked.data(), m);
            }
        }
        int k = n - 1;
        while (k >= 0 && tup[k] == n - 1) tup[k--] = 0;
        if (k < 0) break;
        ++tup[k];
    }
    return global_constant(n) * g.u * sum;
}

double whitney_integrand_1d(const Immersion& f, double x) {
    if (f.dim() != 1) throw DimensionMismatchError("whitney_integrand_1d: n must be 1");
    double jac[2], hess[2];
    f.jacobian(&x, jac);
    f.hessian(&x, hess);
    const double denom = jac[0] * jac[0] + jac[1] * jac[1];
    if (!(denom > 1e-24))
        throw RankDeficientError("whitney_integrand_1d: both derivatives vanish");
    return (hess[0] * jac[1] - hess[1] * jac[0]) / denom;
}

FormValue exterior_derivative_fd(const StiefelForm& form, const StiefelPoint& phi,
                                 std::span<const TangentVector> tangents, double h,
                                 bool richardson) {
    const int n = phi.n;
    if (int(tangents.size()) != n + 1)
        throw DimensionMismatchError("exterior_derivative_fd: expected n + 1 tangent vectors");
    if (!(h > 0.0)) throw ConfigError("exterior_derivative_fd: h must be positive");
    const double phi_norm = std::max(phi.entries.frobenius_norm(), 1e-12);

    auto attempt = [&](double step_scale) -> FormValue {
        double sum = 0.0;
        double scale = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double tnorm = tangents[i].entries.frobenius_norm();
            if (!(tnorm > 0.0)) continue;  // derivative along a zero field is zero
            const double step = step_scale * h * phi_norm / tnorm;
            std::vector<TangentVector> rest;
            rest.reserve(n);
            for (int k = 0; k <= n; ++k)
                if (k != i) rest.push_back(tangents[k]);
            auto central = [&](double s) {
                Matrix plus = phi.entries, minus = phi.entries;
                for (int r = 0; r < 2 * n; ++r)
                    for (int c = 0; c < n; ++c) {
                        plus(r, c) += s * tangents[i].entries(r, c);
                        minus(r, c) -= s * tangents[i].entries(r, c);
                    }
                const FormValue fp = form(StiefelPoint(n, std::move(plus)), rest);
                const FormValue fm = form(StiefelPoint(n, std::move(minus)), rest);
                scale = std::max({scale, fp.term_scale, fm.term_scale});
                return (fp.value - fm.value) / (2.0 * s);
            };
            double deriv = central(step);
            if (richardson) deriv = (4.0 * central(step * 0.5) - deriv) / 3.0;
            sum += (i % 2 == 0 ? 1.0 : -1.0) * deriv;
        }
        return {sum, scale};
    };

    try {
        return attempt(1.0);
    } catch (const RankDeficientError&) {
        return attempt(0.25);  // shrink once, then let the error escape
    }
}

FormValue exterior_derivative_fd(const StiefelPoint& phi, std::span<const TangentVector> tangents,
                                 double h, bool richardson) {
    const StiefelForm form = omega_form();
    return exterior_derivative_fd(form, phi, tangents, h, richardson);
}

ClosednessCheck run_closedness_check(int n, int samples, std::uint64_t seed, double h,
                                     double threshold, double det_u_min, const StiefelForm* form) {
    if (n % 2 != 0) throw OddDimensionError("run_closedness_check: n must be even");
    ClosednessCheck out;
    out.samples = samples;
    out.threshold = threshold;
    Rng rng(seed);
    const StiefelForm omega = form ? *form : omega_form();
    for (int s = 0; s < samples; ++s) {
        Matrix pm(2 * n, n);
        for (;;) {
            for (int r = 0; r < 2 * n; ++r)
                for (int c = 0; c < n; ++c) pm(r, c) = rng.uniform(-2.0, 2.0);
            try {
                if (gram(StiefelPoint(n, pm)).det_U > det_u_min) break;
            } catch (const RankDeficientError&) {
            }
        }
        StiefelPoint phi(n, pm);
        std::vector<TangentVector> tangents;
        tangents.reserve(n + 1);
        for (int k = 0; k <= n; ++k) {
            Matrix t(2 * n, n);
            for (int r = 0; r < 2 * n; ++r)
                for (int c = 0; c < n; ++c) t(r, c) = rng.uniform(-2.0, 2.0);
            tangents.emplace_back(n, std::move(t));
        }
        const FormValue d = exterior_derivative_fd(omega, phi, tangents, h);
        const double normalized = std::fabs(d.value) / std::max(d.term_scale, 1e-300);
        out.max_normalized = std::max(out.max_normalized, normalized);
    }
    out.pass = (samples == 0) || (out.max_normalized < threshold);
    return out;
}

}  // namespace immindex

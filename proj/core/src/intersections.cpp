#include "immindex/intersections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "immindex/parallel.hpp"

namespace immindex {

void SolverConfig::validate(int n) const {
    (void)n;
    if (grid_points_per_axis < 0) throw ConfigError("SolverConfig: grid_points_per_axis must be >= 0");
    if (!(domain_halfwidth > 0.0)) throw ConfigError("SolverConfig: domain_halfwidth must be positive");
    if (!(diagonal_exclusion > 0.0)) throw ConfigError("SolverConfig: diagonal_exclusion must be positive");
    if (newton_max_iter < 1) throw ConfigError("SolverConfig: newton_max_iter must be >= 1");
    if (!(newton_tol > 0.0) || !(cluster_radius > 0.0) || !(transversality_threshold > 0.0))
        throw ConfigError("SolverConfig: tolerances must be positive");
    if (!(newton_tol < cluster_radius))
        throw ConfigError("SolverConfig: newton_tol must be smaller than cluster_radius");
}

int SolverConfig::effective_grid(int n) const {
    if (grid_points_per_axis > 0) return grid_points_per_axis;
    if (n <= 2) return 9;
    if (n == 3) return 5;
    return 3;
}

namespace {

struct Root {
    std::vector<double> z;  // (x, y), canonical order
    double residual = 0.0;
};

/// |f(x) - f(y)| and the difference vector.
double residual_of(const Immersion& f, const double* z, double* diff, int n) {
    double fx[2 * kMaxDomainDim], fy[2 * kMaxDomainDim];
    f.value(z, fx);
    f.value(z + n, fy);
    double s = 0.0;
    for (int j = 0; j < 2 * n; ++j) {
        diff[j] = fx[j] - fy[j];
        s += diff[j] * diff[j];
    }
    return std::sqrt(s);
}

/// Damped Gauss-Newton on F(z) = f(x) - f(y), z = (x, y). The 2n x 2n
/// Jacobian is [D_f(x) | -D_f(y)] in column blocks. Returns true when the
/// iteration converged to residual < tol inside the search box.
bool newton_solve(const Immersion& f, std::vector<double>& z, const SolverConfig& cfg, int n) {
    const int m = 2 * n;
    double diff[2 * kMaxDomainDim];
    double jx[2 * kMaxDomainDim * kMaxDomainDim], jy[2 * kMaxDomainDim * kMaxDomainDim];
    std::vector<double> jac(size_t(m) * m), rhs(m), trial(z.size());
    double res = residual_of(f, z.data(), diff, n);
    const double bound = cfg.domain_halfwidth * 4.0;  // divergence guard

    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        if (res < cfg.newton_tol * 1e-2) break;
        f.jacobian(z.data(), jx);
        f.jacobian(z.data() + n, jy);
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < n; ++i) {
                jac[size_t(j) * m + i] = jx[size_t(j) * n + i];
                jac[size_t(j) * m + n + i] = -jy[size_t(j) * n + i];
            }
            rhs[j] = -diff[j];
        }
        // solve jac * delta = rhs in place (partial pivoting)
        std::vector<double> a = jac, b = rhs;
        bool singular = false;
        for (int k = 0; k < m; ++k) {
            int piv = k;
            double best = std::fabs(a[size_t(k) * m + k]);
            for (int r = k + 1; r < m; ++r) {
                const double v = std::fabs(a[size_t(r) * m + k]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-14) {
                singular = true;
                break;
            }
            if (piv != k) {
                for (int c = k; c < m; ++c) std::swap(a[size_t(piv) * m + c], a[size_t(k) * m + c]);
                std::swap(b[piv], b[k]);
            }
            for (int r = k + 1; r < m; ++r) {
                const double fct = a[size_t(r) * m + k] / a[size_t(k) * m + k];
                if (fct == 0.0) continue;
                for (int c = k; c < m; ++c) a[size_t(r) * m + c] -= fct * a[size_t(k) * m + c];
                b[r] -= fct * b[k];
            }
        }
        if (singular) return false;
        std::vector<double> delta(m);
        for (int k = m - 1; k >= 0; --k) {
            double s = b[k];
            for (int c = k + 1; c < m; ++c) s -= a[size_t(k) * m + c] * delta[c];
            delta[k] = s / a[size_t(k) * m + k];
        }

        double step_norm = 0.0;
        for (int k = 0; k < m; ++k) step_norm += delta[k] * delta[k];
        step_norm = std::sqrt(step_norm);

        // halving line search on the residual norm
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 25; ++ls) {
            for (int k = 0; k < m; ++k) trial[k] = z[k] + t * delta[k];
            double d2[2 * kMaxDomainDim];
            const double tres = residual_of(f, trial.data(), d2, n);
            if (tres < res * (1.0 - 1e-4 * t) || tres < cfg.newton_tol * 1e-2) {
                z = trial;
                std::copy(d2, d2 + m, diff);
                res = tres;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) return res < cfg.newton_tol;
        for (int k = 0; k < m; ++k)
            if (std::fabs(z[k]) > bound) return false;
        if (step_norm * t < 1e-12) break;
    }
    return res < cfg.newton_tol;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void canonicalize(std::vector<double>& z, int n) {
    std::vector<double> x(z.begin(), z.begin() + n), y(z.begin() + n, z.end());
    if (lex_less(y, x)) {
        std::copy(y.begin(), y.end(), z.begin());
        std::copy(x.begin(), x.end(), z.begin() + n);
    }
}

double pair_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

Matrix stacked_jacobians(const Immersion& f, const double* x, const double* y) {
    const int n = f.dim();
    const int m = 2 * n;
    double jx[2 * kMaxDomainDim * kMaxDomainDim], jy[2 * kMaxDomainDim * kMaxDomainDim];
    f.jacobian(x, jx);
    f.jacobian(y, jy);
    Matrix s(m, m);
    // row k: d f_j / d x_k at x; row n + k: at y (columns j)
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < m; ++j) {
            s(k, j) = jx[size_t(j) * n + k];
            s(n + k, j) = jy[size_t(j) * n + k];
        }
    return s;
}

std::vector<Root> collect_roots(const Immersion& f, const SolverConfig& cfg, int grid,
                                FinderDiagnostics* diag) {
    const int n = f.dim();
    const int m = 2 * n;
    const double hw = cfg.domain_halfwidth;

    long total = 1;
    for (int i = 0; i < m; ++i) total *= grid;
    if (diag) diag->seeds += total;

    std::vector<std::optional<Root>> results(total);
    parallel_for(size_t(total), [&](std::size_t seed_index) {
        std::vector<double> z(m);
        long rem = long(seed_index);
        for (int i = 0; i < m; ++i) {
            const int gi = int(rem % grid);
            rem /= grid;
            z[i] = (grid == 1) ? 0.0 : -hw + 2.0 * hw * double(gi) / double(grid - 1);
        }
        double dxy = 0.0;
        for (int i = 0; i < n; ++i) dxy += (z[i] - z[n + i]) * (z[i] - z[n + i]);
        if (std::sqrt(dxy) < cfg.diagonal_exclusion) return;  // diagonal seed
        if (!newton_solve(f, z, cfg, n)) return;
        double sep = 0.0;
        for (int i = 0; i < n; ++i) sep += (z[i] - z[n + i]) * (z[i] - z[n + i]);
        if (std::sqrt(sep) < cfg.diagonal_exclusion) return;  // converged to the diagonal
        canonicalize(z, n);
        double diff[2 * kMaxDomainDim];
        Root r;
        r.residual = residual_of(f, z.data(), diff, n);
        r.z = std::move(z);
        if (r.residual < cfg.newton_tol) results[seed_index] = std::move(r);
    });

    std::vector<Root> roots;
    for (auto& r : results)
        if (r) {
            roots.push_back(std::move(*r));
            if (diag) ++diag->converged;
        }
    return roots;
}

/// Union-find clustering with radius cfg.cluster_radius; representative is
/// the cluster mean polished by one more solve.
std::vector<Root> cluster_roots(const Immersion& f, const SolverConfig& cfg,
                                std::vector<Root> roots) {
    const int n = f.dim();
    const size_t k = roots.size();
    std::vector<size_t> parent(k);
    std::iota(parent.begin(), parent.end(), size_t(0));
    std::function<size_t(size_t)> find = [&](size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (size_t a = 0; a < k; ++a)
        for (size_t b = a + 1; b < k; ++b)
            if (pair_distance(roots[a].z, roots[b].z) < cfg.cluster_radius) {
                const size_t ra = find(a), rb = find(b);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
    std::vector<Root> out;
    for (size_t a = 0; a < k; ++a) {
        if (find(a) != a) continue;
        std::vector<double> mean(roots[a].z.size(), 0.0);
        long count = 0;
        for (size_t b = 0; b < k; ++b)
            if (find(b) == a) {
                for (size_t c = 0; c < mean.size(); ++c) mean[c] += roots[b].z[c];
                ++count;
            }
        for (double& v : mean) v /= double(count);
        SolverConfig polish = cfg;
        polish.newton_max_iter = 2;
        newton_solve(f, mean, polish, n);
        canonicalize(mean, n);
        Root r;
        double diff[2 * kMaxDomainDim];
        r.residual = residual_of(f, mean.data(), diff, n);
        r.z = std::move(mean);
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) { return lex_less(a.z, b.z); });
    return out;
}

std::vector<Root> find_roots(const Immersion& f, const SolverConfig& cfg, int grid,
                             FinderDiagnostics* diag) {
    return cluster_roots(f, cfg, collect_roots(f, cfg, grid, diag));
}

}  // namespace

std::vector<IntersectionRecord> find_self_intersections(const Immersion& f, const SolverConfig& cfg,
                                                        FinderDiagnostics* diag) {
    const int n = f.dim();
    cfg.validate(n);
    const int grid = cfg.effective_grid(n);
    std::vector<Root> roots = find_roots(f, cfg, grid, diag);

    if (cfg.verify_completeness) {
        // completeness is heuristic: the doubled grid must agree
        std::vector<Root> fine = find_roots(f, cfg, 2 * grid - 1, nullptr);
        bool same = fine.size() == roots.size();
        if (same)
            for (size_t i = 0; i < roots.size(); ++i)
                if (pair_distance(roots[i].z, fine[i].z) > 10.0 * cfg.cluster_radius) same = false;
        if (!same) {
            if (diag) {
                diag->completeness_warning = true;
                diag->note = "finer-grid rerun found a different intersection set";
            }
            if (fine.size() > roots.size()) roots = std::move(fine);
        }
    }

    std::vector<IntersectionRecord> records;
    records.reserve(roots.size());
    for (const Root& r : roots) {
        IntersectionRecord rec;
        rec.preimage_1.assign(r.z.begin(), r.z.begin() + n);
        rec.preimage_2.assign(r.z.begin() + n, r.z.end());
        rec.residual = r.residual;
        std::vector<double> fx = f.value_at(rec.preimage_1);
        std::vector<double> fy = f.value_at(rec.preimage_2);
        rec.ambient_point.resize(2 * n);
        for (int j = 0; j < 2 * n; ++j) rec.ambient_point[j] = 0.5 * (fx[j] + fy[j]);

        const double* p1 = rec.preimage_1.data();
        const double* p2 = rec.preimage_2.data();
        if (n == 1 && p1[0] > p2[0]) std::swap(p1, p2);  // ascending order for curves
        rec.transversality_det = determinant(stacked_jacobians(f, p1, p2));
        if (std::fabs(rec.transversality_det) < cfg.transversality_threshold)
            throw NonTransversalError(
                "find_self_intersections: intersection fails the transversality test "
                "(input not generic)");
        rec.sign = rec.transversality_det > 0.0 ? +1 : -1;
        records.push_back(std::move(rec));
    }
    return records;
}

int sign_of_intersection(const IntersectionRecord& rec, const Immersion& f,
                         double degenerate_threshold) {
    const int n = f.dim();
    if (n != 1 && n % 2 != 0)
        throw OddDimensionError("sign_of_intersection: signs are defined for n even or n = 1");
    const double* p1 = rec.preimage_1.data();
    const double* p2 = rec.preimage_2.data();
    if (n == 1 && p1[0] > p2[0]) std::swap(p1, p2);
    const double det = determinant(stacked_jacobians(f, p1, p2));
    if (std::fabs(det) < degenerate_threshold)
        throw DegenerateDeterminantError("sign_of_intersection: stacked determinant is numerically zero");
    return det > 0.0 ? +1 : -1;
}

IndexReport index_by_signs(const Immersion& f, const SolverConfig& cfg, FinderDiagnostics* diag) {
    const int n = f.dim();
    const std::vector<IntersectionRecord> records = find_self_intersections(f, cfg, diag);
    IndexReport rep;
    rep.evaluations = std::int64_t(records.size());
    if (n == 1 || n % 2 == 0) {
        long sum = 0;
        for (const IntersectionRecord& rec : records) sum += sign_of_intersection(rec, f);
        rep.method = "sign-sum";
        rep.raw_value = double(sum);
        rep.index = sum;
    } else {
        rep.method = "parity";
        rep.raw_value = double(records.size());
        rep.index = long(records.size() % 2);
    }
    rep.index_valid = true;
    rep.residual = 0.0;
    rep.error_estimate = 0.0;
    return rep;
}

}  // namespace immindex

// Acceptance suite: one self-contained check per criterion, one PASS/FAIL
// line each, exit code = number of failures. Tolerances are pinned here, not
// configurable.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cli.hpp"
#include "immindex/immersion.hpp"
#include "immindex/intersections.hpp"
#include "immindex/laplace.hpp"
#include "immindex/quadrature.hpp"
#include "immindex/rng.hpp"
#include "immindex/stiefel_form.hpp"

using namespace immindex;

namespace {

int g_failures = 0;

struct Criterion {
    int number;
    std::string summary;
    std::function<bool(std::string&)> run;
};

void run_criterion(const Criterion& c) {
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        ok = c.run(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        ok = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %2d: %s (%s; %.1fs)\n", ok ? "PASS" : "FAIL", c.number,
                c.summary.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

Immersion lifted() { return cli::build_immersion(cli::example_spec("lifted2")); }
Immersion doubled() { return cli::build_immersion(cli::example_spec("double2")); }
Immersion perturbed() { return cli::build_immersion(cli::example_spec("perturbed2")); }

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

bool within_wall(double secs, double budget, std::string& detail) {
    if (secs <= budget) return true;
    detail += fmt("; wall %.1fs exceeded budget %.0fs", secs, budget);
    return false;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;

    criteria.push_back({1, "dual-method index, n=2 lifted one-loop immersion", [](std::string& d) {
        const auto t0 = std::chrono::steady_clock::now();
        const Immersion f = lifted();
        const IndexReport signs = index_by_signs(f, SolverConfig{});
        const IndexReport integral = index_by_integral(f, QuadratureConfig{});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        d = fmt("sign-sum=%ld, integral raw=%.6f, residual=%.2e", signs.index, integral.raw_value,
                integral.residual);
        bool ok = std::labs(signs.index) == 1;
        ok = ok && integral.index_valid && integral.index == signs.index;
        ok = ok && integral.residual < 1e-2;
        ok = ok && within_wall(secs, 60.0, d);
        return ok;
    }});

    criteria.push_back({2, "n=1 baseline: rotation integral vs ordered sign sum", [](std::string& d) {
        const auto t0 = std::chrono::steady_clock::now();
        const Immersion f = one_loop_curve();
        QuadratureConfig cfg;
        cfg.abs_tol = 1e-8;
        cfg.rel_tol = 1e-8;
        const IndexReport quad = index_whitney_1d(f, cfg);
        const IndexReport signs = index_by_signs(f, SolverConfig{});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        d = fmt("quad raw=%.9f, sign-sum=%ld, residual=%.2e", quad.raw_value, signs.index,
                quad.residual);
        bool ok = quad.index_valid && std::labs(quad.index) == 1;
        ok = ok && quad.index == signs.index;
        ok = ok && quad.residual < 1e-6;
        ok = ok && within_wall(secs, 1.0, d);
        return ok;
    }});

    criteria.push_back({3, "index additivity under concatenation, both methods", [](std::string& d) {
        const std::vector<Immersion> pool = {trivial_immersion(2), lifted(), doubled()};
        SolverConfig scfg;
        QuadratureConfig qcfg;
        std::vector<long> sign_idx, int_idx;
        for (const Immersion& f : pool) {
            sign_idx.push_back(index_by_signs(f, scfg).index);
            const IndexReport r = index_by_integral(f, qcfg);
            if (!r.index_valid) {
                d = "pool integral failed to round";
                return false;
            }
            int_idx.push_back(r.index);
        }
        int checked = 0;
        for (size_t a = 0; a < pool.size(); ++a)
            for (size_t b = 0; b < pool.size(); ++b) {
                const Immersion fg = concat(pool[a], pool[b]);
                const long by_signs = index_by_signs(fg, scfg).index;
                const IndexReport by_int = index_by_integral(fg, qcfg);
                if (by_signs != sign_idx[a] + sign_idx[b]) {
                    d = fmt("sign-sum additivity broke at pair (%zu,%zu)", a, b);
                    return false;
                }
                if (!by_int.index_valid || by_int.index != int_idx[a] + int_idx[b]) {
                    d = fmt("integral additivity broke at pair (%zu,%zu)", a, b);
                    return false;
                }
                ++checked;
            }
        d = fmt("%d ordered pairs, exact integer equality both methods", checked);
        return true;
    }});

    criteria.push_back({4, "closedness of the index form (finite differences)", [](std::string& d) {
        const auto t0 = std::chrono::steady_clock::now();
        const ClosednessCheck check = run_closedness_check(2, 100, 2024, 1e-4, 1e-4, 1e-3);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        d = fmt("100 samples, max normalized |d omega| = %.3e", check.max_normalized);
        return check.pass && within_wall(secs, 30.0, d);
    }});

    criteria.push_back({5, "pointwise equality of the two integrand routes", [](std::string& d) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<Immersion> pool = {trivial_immersion(2), lifted(), doubled(), perturbed()};
        Rng rng(5150);
        double worst = 0.0;
        for (const Immersion& f : pool) {
            const double r = f.support_halfwidth();
            for (int s = 0; s < 100; ++s) {
                double x[2] = {rng.uniform(-r, r), rng.uniform(-r, r)};
                const double a = integrand_pullback(f, x);
                const double b = integrand_direct(f, x);
                worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(b)));
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        d = fmt("4 immersions x 100 points, worst relative gap %.3e", worst);
        return worst <= 1e-8 && within_wall(secs, 5.0, d);
    }});

    criteria.push_back({6, "Laplace integral vanishing and leading-order decomposition", [](std::string& d) {
        const auto t0 = std::chrono::steady_clock::now();
        const Immersion f = lifted();
        QuadratureConfig jcfg;
        jcfg.abs_tol = 1e-3;
        jcfg.rel_tol = 0.0;
        jcfg.rule_order = 5;
        jcfg.max_subdivisions = 2000000;
        const auto reports =
            laplace_sweep(f, {50.0, 100.0}, jcfg, QuadratureConfig{}, SolverConfig{});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const LaplaceReport& r50 = reports[0];
        const LaplaceReport& r100 = reports[1];
        d = fmt("J(50)=%.2e, norm defect %.5f (50) / %.5f (100), |defect| %.2e -> %.2e",
                r50.J_value, r50.normalized_defect, r100.normalized_defect, std::fabs(r50.defect),
                std::fabs(r100.defect));
        bool ok = std::fabs(r50.J_value) < 10.0 * 1e-3;
        ok = ok && r50.normalized_defect < 0.02;
        ok = ok && r100.normalized_defect < 0.02;
        ok = ok && std::fabs(r100.defect) < std::fabs(r50.defect);
        ok = ok && within_wall(secs, 600.0, d);
        return ok;
    }});

    criteria.push_back({7, "generator normalization: |integral index| of the one-intersection map",
                        [](std::string& d) {
        const IndexReport integral = index_by_integral(lifted(), QuadratureConfig{});
        d = fmt("raw=%.6f rounds to %ld", integral.raw_value, integral.index);
        return integral.index_valid && std::labs(integral.index) == 1;
    }});

    criteria.push_back({8, "sign invariance under preimage swap at every intersection", [](std::string& d) {
        SolverConfig cfg;
        int checked = 0;
        for (const Immersion& f : {lifted(), doubled(), perturbed()}) {
            for (const IntersectionRecord& rec : find_self_intersections(f, cfg)) {
                IntersectionRecord swapped = rec;
                std::swap(swapped.preimage_1, swapped.preimage_2);
                if (sign_of_intersection(rec, f) != sign_of_intersection(swapped, f)) {
                    d = "swap changed a sign";
                    return false;
                }
                ++checked;
            }
        }
        d = fmt("%d intersections checked, exact", checked);
        return checked > 0;
    }});

    criteria.push_back({9, "homotopy probe: interior bump changes no reported integer", [](std::string& d) {
        SolverConfig scfg;
        QuadratureConfig qcfg;
        const Immersion base = lifted();
        const Immersion bumped = perturbed();
        const long s0 = index_by_signs(base, scfg).index;
        const long s1 = index_by_signs(bumped, scfg).index;
        const IndexReport i0 = index_by_integral(base, qcfg);
        const IndexReport i1 = index_by_integral(bumped, qcfg);
        d = fmt("sign-sum %ld -> %ld, integral %ld -> %ld", s0, s1, i0.index, i1.index);
        return s0 == s1 && i0.index_valid && i1.index_valid && i0.index == i1.index;
    }});

    criteria.push_back({10, "derivative validation of every builder immersion", [](std::string& d) {
        double worst_j = 0.0, worst_h = 0.0;
        for (const std::string& name : cli::example_names()) {
            const Immersion f = cli::build_immersion(cli::example_spec(name));
            const DerivativeValidation v = validate_derivatives(f, 200, 1e-5);
            worst_j = std::max(worst_j, v.max_jacobian_deviation);
            worst_h = std::max(worst_h, v.max_hessian_deviation);
        }
        const DerivativeValidation v = validate_derivatives(mirror_last_coordinate(lifted()), 200, 1e-5);
        worst_j = std::max(worst_j, v.max_jacobian_deviation);
        worst_h = std::max(worst_h, v.max_hessian_deviation);
        d = fmt("worst jacobian dev %.2e, worst hessian dev %.2e", worst_j, worst_h);
        return worst_j < 1e-5 && worst_h < 1e-5;
    }});

    std::printf("acceptance suite: %zu criteria\n", criteria.size());
    for (const Criterion& c : criteria) run_criterion(c);
    std::printf("%s: %d of %zu criteria failed\n", g_failures == 0 ? "OK" : "FAILURES", g_failures,
                criteria.size());
    return g_failures;
}

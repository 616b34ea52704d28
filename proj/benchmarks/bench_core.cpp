#include <benchmark/benchmark.h>

#include "immindex/immersion.hpp"
#include "immindex/intersections.hpp"
#include "immindex/quadrature.hpp"
#include "immindex/rng.hpp"
#include "immindex/stiefel_form.hpp"

using namespace immindex;

namespace {

Immersion lifted() { return lift(one_loop_curve(), BumpFunction(0.2, 0.8, 1.0)); }

void BM_jacobian_lifted(benchmark::State& state) {
    const Immersion f = lifted();
    double jac[8];
    const double x[2] = {0.31, -0.12};
    for (auto _ : state) {
        f.jacobian(x, jac);
        benchmark::DoNotOptimize(jac);
    }
}
BENCHMARK(BM_jacobian_lifted);

void BM_hessian_lifted(benchmark::State& state) {
    const Immersion f = lifted();
    double hess[16];
    const double x[2] = {0.31, -0.12};
    for (auto _ : state) {
        f.hessian(x, hess);
        benchmark::DoNotOptimize(hess);
    }
}
BENCHMARK(BM_hessian_lifted);

void BM_omega_eval(benchmark::State& state) {
    Rng rng(1);
    Matrix pm(4, 2);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 2; ++c) pm(r, c) = rng.uniform(-2.0, 2.0);
    const StiefelPoint phi(2, pm);
    std::vector<TangentVector> ts;
    for (int k = 0; k < 2; ++k) {
        Matrix t(4, 2);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 2; ++c) t(r, c) = rng.uniform(-2.0, 2.0);
        ts.emplace_back(2, std::move(t));
    }
    for (auto _ : state) benchmark::DoNotOptimize(omega_eval(phi, ts));
}
BENCHMARK(BM_omega_eval);

void BM_integrand_pullback(benchmark::State& state) {
    const Immersion f = lifted();
    const double x[2] = {0.31, -0.12};
    for (auto _ : state) benchmark::DoNotOptimize(integrand_pullback(f, x));
}
BENCHMARK(BM_integrand_pullback);

void BM_index_by_integral(benchmark::State& state) {
    const Immersion f = lifted();
    for (auto _ : state) benchmark::DoNotOptimize(index_by_integral(f, QuadratureConfig{}));
}
BENCHMARK(BM_index_by_integral)->Unit(benchmark::kMillisecond);

void BM_find_intersections(benchmark::State& state) {
    const Immersion f = lifted();
    SolverConfig cfg;
    cfg.verify_completeness = false;
    for (auto _ : state) benchmark::DoNotOptimize(find_self_intersections(f, cfg));
}
BENCHMARK(BM_find_intersections)->Unit(benchmark::kMillisecond);

void BM_det4(benchmark::State& state) {
    Rng rng(2);
    double a[16];
    for (auto _ : state) {
        double buf[16];
        for (int i = 0; i < 16; ++i) buf[i] = a[i] = rng.uniform(-1.0, 1.0);
        benchmark::DoNotOptimize(lu_determinant_inplace(buf, 4));
    }
}
BENCHMARK(BM_det4);

}  // namespace

BENCHMARK_MAIN();

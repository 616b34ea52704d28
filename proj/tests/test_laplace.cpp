#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "immindex/laplace.hpp"

using namespace immindex;
using namespace immindex::testing;

namespace {

QuadratureConfig laplace_cfg(double tol = 1e-3) {
    QuadratureConfig cfg;
    cfg.abs_tol = tol;
    cfg.rel_tol = 0.0;
    cfg.rule_order = 5;
    cfg.max_subdivisions = 2000000;
    return cfg;
}

}  // namespace

TEST_CASE("J of the trivial immersion is identically zero") {
    // the stacked matrix [I 0; I 0] is singular everywhere
    const QuadratureResult j = laplace_J(trivial_immersion(2), 50.0, laplace_cfg());
    CHECK(j.value == 0.0);
}

TEST_CASE("J of the lifted example vanishes within tolerance across the sweep") {
    const Immersion f = lifted_example();
    for (double lambda : {25.0, 50.0, 100.0}) {
        const QuadratureResult j = laplace_J(f, lambda, laplace_cfg());
        CHECK(std::fabs(j.value) < 10.0 * 1e-3);
        CHECK_FALSE(j.budget_exhausted);
    }
}

TEST_CASE("J vanishes for every even-dimensional example at lambda = 50") {
    const Immersion examples[] = {trivial_immersion(2), lifted_example(),
                                  concat(lifted_example(), lifted_example()),
                                  perturb(lifted_example(), 4, 0.01, {0.4, 0.1}, 0.3)};
    for (const Immersion& f : examples) {
        const QuadratureResult j = laplace_J(f, 50.0, laplace_cfg());
        CHECK(std::fabs(j.value) < 10.0 * 1e-3);
    }
}

TEST_CASE("decomposition of the trivial immersion is all zeros") {
    const LaplaceReport rep =
        laplace_decomposition(trivial_immersion(2), 50.0, laplace_cfg(), QuadratureConfig{},
                              SolverConfig{});
    CHECK(rep.J_value == 0.0);
    CHECK(rep.diag_value == 0.0);
    CHECK(rep.selfint_value == 0.0);
    CHECK(rep.defect == 0.0);
}

TEST_CASE("leading-order cancellation on the lifted example") {
    const Immersion f = lifted_example();
    const auto reports = laplace_sweep(f, {50.0, 100.0}, laplace_cfg(), QuadratureConfig{},
                                       SolverConfig{});
    REQUIRE(reports.size() == 2);
    const LaplaceReport& r50 = reports[0];
    const LaplaceReport& r100 = reports[1];

    // diag and selfint carry the localization scale 2 (2 pi / lambda)^n
    const double scale50 = 2.0 * std::pow(2.0 * std::numbers::pi / 50.0, 2);
    CHECK(r50.selfint_value == doctest::Approx(-scale50).epsilon(1e-12));
    CHECK(r50.diag_value == doctest::Approx(scale50).epsilon(1e-3));

    CHECK(r50.normalized_defect < 0.02);
    CHECK(r100.normalized_defect < 0.02);
    CHECK(std::fabs(r100.defect) < std::fabs(r50.defect));  // the scale factor decays as 1/lambda^n
    CHECK(r50.normalized_remainder < 0.02);
}

TEST_CASE("laplace rejects bad inputs") {
    CHECK_THROWS_AS(laplace_J(trivial_immersion(1), 50.0, laplace_cfg()), OddDimensionError);
    CHECK_THROWS_AS(laplace_J(trivial_immersion(2), -1.0, laplace_cfg()), ConfigError);
}

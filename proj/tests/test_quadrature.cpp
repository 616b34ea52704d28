#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "immindex/intersections.hpp"
#include "immindex/quadrature.hpp"
#include "immindex/stiefel_form.hpp"

using namespace immindex;
using namespace immindex::testing;

TEST_CASE("constant and polynomial integrands are exact") {
    QuadratureConfig cfg;
    Box box;
    box.dim = 2;
    box.lo = {0.0, 0.0};
    box.hi = {1.0, 1.0};
    const QuadratureResult one = integrate_adaptive([](const double*) { return 1.0; }, box, cfg);
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));

    const QuadratureResult poly = integrate_adaptive(
        [](const double* x) { return x[0] * x[0] * x[1] * x[1]; }, box, cfg);
    CHECK(poly.value == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("gauss rules integrate their exactness-degree monomials") {
    for (int order : {3, 5, 7}) {
        const auto& nodes = gauss_nodes(order);
        const auto& weights = gauss_weights(order);
        // x^(2 order - 2) on [-1, 1]
        const int p = 2 * order - 2;
        double sum = 0.0;
        for (int k = 0; k < order; ++k) sum += weights[k] * std::pow(nodes[k], p);
        CHECK(sum == doctest::Approx(2.0 / (p + 1)).epsilon(1e-12));
    }
}

TEST_CASE("adaptive integration matches a fixed 512^2 midpoint oracle") {
    const Immersion f = lifted_example();
    const double r = f.support_halfwidth() + 0.05;
    const int grid = 512;
    double oracle = 0.0;
    const double hcell = 2.0 * r / grid;
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            const double x[2] = {-r + (a + 0.5) * hcell, -r + (b + 0.5) * hcell};
            oracle += integrand_pullback(f, x);
        }
    oracle *= hcell * hcell;

    QuadratureConfig cfg;
    Box box = Box::cube(2, r);
    const Immersion g = f;
    const QuadratureResult q =
        integrate_adaptive([g](const double* x) { return integrand_pullback(g, x); }, box, cfg);
    CHECK(std::fabs(q.value - oracle) < 5e-4);  // oracle is O(h^2) accurate itself
}

TEST_CASE("budget exhaustion is reported, value still returned") {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-14;
    cfg.rel_tol = 0.0;
    cfg.max_subdivisions = 3;
    Box box;
    box.dim = 1;
    box.lo = {0.0};
    box.hi = {3.14159};
    const QuadratureResult q =
        integrate_adaptive([](const double* x) { return std::sin(7.0 * x[0]) + 1.0; }, box, cfg);
    CHECK(q.budget_exhausted);
    CHECK(q.value == doctest::Approx(3.14159 + (1.0 - std::cos(7.0 * 3.14159)) / 7.0).epsilon(1e-3));
}

TEST_CASE("index by integral: trivial map") {
    const IndexReport rep = index_by_integral(trivial_immersion(2), QuadratureConfig{});
    CHECK(rep.raw_value == 0.0);
    CHECK(rep.index == 0);
    CHECK(rep.index_valid);
}

TEST_CASE("index by integral agrees with the sign sum on the lifted example") {
    const Immersion f = lifted_example();
    const IndexReport integral = index_by_integral(f, QuadratureConfig{});
    const IndexReport signs = index_by_signs(f, SolverConfig{});
    REQUIRE(integral.index_valid);
    CHECK(integral.residual < 1e-2);
    CHECK(integral.index == signs.index);
    CHECK(std::labs(integral.index) == 1);
}

TEST_CASE("index doubles under self-concatenation") {
    const Immersion f = lifted_example();
    const Immersion ff = concat(f, f);
    const IndexReport one = index_by_integral(f, QuadratureConfig{});
    const IndexReport two = index_by_integral(ff, QuadratureConfig{});
    REQUIRE(one.index_valid);
    REQUIRE(two.index_valid);
    CHECK(two.index == 2 * one.index);
    CHECK(index_by_signs(ff, SolverConfig{}).index == 2 * index_by_signs(f, SolverConfig{}).index);
}

TEST_CASE("whitney index of the trivial curve is 0") {
    const IndexReport rep = index_whitney_1d(trivial_immersion(1), QuadratureConfig{});
    CHECK(rep.raw_value == 0.0);
    CHECK(rep.index == 0);
}

TEST_CASE("whitney index of the one-loop curve matches its sign") {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-8;
    cfg.rel_tol = 1e-8;
    const Immersion f = one_loop_curve();
    const IndexReport quad = index_whitney_1d(f, cfg);
    const IndexReport signs = index_by_signs(f, SolverConfig{});
    REQUIRE(quad.index_valid);
    CHECK(quad.residual < 1e-6);
    CHECK(std::labs(quad.index) == 1);
    CHECK(quad.index == signs.index);
}

TEST_CASE("mirroring the curve negates the whitney index") {
    QuadratureConfig cfg;
    const IndexReport plain = index_whitney_1d(one_loop_curve(), cfg);
    const IndexReport mirrored = index_whitney_1d(mirror_last_coordinate(one_loop_curve()), cfg);
    REQUIRE(plain.index_valid);
    REQUIRE(mirrored.index_valid);
    CHECK(mirrored.index == -plain.index);
}

TEST_CASE("halving tolerances never changes a reported integer") {
    const Immersion examples[] = {lifted_example(), concat(lifted_example(), lifted_example())};
    for (const Immersion& f : examples) {
        QuadratureConfig cfg;
        const IndexReport coarse = index_by_integral(f, cfg);
        cfg.abs_tol /= 2.0;
        cfg.rel_tol /= 2.0;
        const IndexReport fine = index_by_integral(f, cfg);
        REQUIRE(coarse.index_valid);
        REQUIRE(fine.index_valid);
        CHECK(coarse.index == fine.index);
    }
}

TEST_CASE("rounding is refused for ambiguous raw values") {
    const IndexReport rep = make_rounded_report("integral", 0.62, 0.0, 0, false);
    CHECK_FALSE(rep.index_valid);
    CHECK(rep.residual >= 0.1);
}

TEST_CASE("the lifted index does not depend on the separating bump") {
    const Immersion alt = lift(one_loop_curve(), BumpFunction(-0.3, 0.65, -2.0));
    const IndexReport signs = index_by_signs(alt, SolverConfig{});
    const IndexReport integral = index_by_integral(alt, QuadratureConfig{});
    REQUIRE(integral.index_valid);
    CHECK(signs.index == integral.index);
    CHECK(signs.index == index_by_signs(lift(one_loop_curve(), BumpFunction(0.2, 0.8, 1.0)),
                                        SolverConfig{}).index);
}

TEST_CASE("lifting the mirrored curve negates the index, both methods") {
    const Immersion plain = lift(one_loop_curve(), BumpFunction(0.2, 0.8, 1.0));
    const Immersion flipped =
        lift(mirror_last_coordinate(one_loop_curve()), BumpFunction(0.2, 0.8, 1.0));
    const IndexReport s0 = index_by_signs(plain, SolverConfig{});
    const IndexReport s1 = index_by_signs(flipped, SolverConfig{});
    const IndexReport i1 = index_by_integral(flipped, QuadratureConfig{});
    REQUIRE(i1.index_valid);
    CHECK(s1.index == -s0.index);
    CHECK(i1.index == s1.index);
}

TEST_CASE("direct-route integral agrees with the pullback route") {
    const Immersion f = lifted_example();
    QuadratureConfig cfg;
    const QuadratureResult direct = integral_index_direct_route(f, cfg);
    const IndexReport pullback = index_by_integral(f, cfg);
    CHECK(direct.value == doctest::Approx(pullback.raw_value).epsilon(1e-6));
}

TEST_CASE("quadrature config validation") {
    QuadratureConfig cfg;
    cfg.rule_order = 2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.rule_order = 16;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = QuadratureConfig{};
    cfg.abs_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(index_by_integral(trivial_immersion(1), QuadratureConfig{}), OddDimensionError);
    CHECK_THROWS_AS(index_whitney_1d(trivial_immersion(2), QuadratureConfig{}),
                    DimensionMismatchError);
}

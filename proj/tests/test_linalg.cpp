#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "immindex/linalg.hpp"
#include "immindex/rng.hpp"

using namespace immindex;
using namespace immindex::testing;

namespace {

StiefelPoint identity_block(int n, double scale = 1.0) {
    Matrix m(2 * n, n);
    for (int i = 0; i < n; ++i) m(i, i) = scale;
    return StiefelPoint(n, std::move(m));
}

}  // namespace

TEST_CASE("sign exponent on explicit sets") {
    CHECK(sign_exponent(IndexSet(2, {1, 2})) == 4);
    CHECK(sign_exponent(IndexSet(2, {3, 4})) == 8);
    CHECK(sign_exponent(IndexSet(4, {1, 2, 3, 4})) == 16);
}

TEST_CASE("sign exponent of a set and its complement") {
    // mu(J) + mu(J^c) = n(n-1) + sum_{1..2n} k, exhaustively for n <= 4
    for (int n = 1; n <= 4; ++n) {
        const long expected = long(n) * (n - 1) + long(n) * (2 * n + 1);
        for (const IndexSet& j : all_index_sets(n))
            CHECK(sign_exponent(j) + sign_exponent(complement(j)) == expected);
    }
}

TEST_CASE("index set enumeration and validation") {
    CHECK(all_index_sets(2).size() == 6);
    CHECK(all_index_sets(3).size() == 20);
    CHECK_THROWS_AS(IndexSet(2, {2, 1}), DimensionMismatchError);
    CHECK_THROWS_AS(IndexSet(2, {1, 5}), DimensionMismatchError);
    CHECK_THROWS_AS(IndexSet(2, {1}), DimensionMismatchError);
}

TEST_CASE("complementary minor on identity blocks") {
    const StiefelPoint phi = identity_block(2);
    CHECK(complementary_minor(phi, IndexSet(2, {3, 4})) == doctest::Approx(1.0));
    CHECK(complementary_minor(phi, IndexSet(2, {1, 2})) == doctest::Approx(0.0));
}

TEST_CASE("complementary minor equals the permutation-sum oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const StiefelPoint phi(2, random_matrix(rng, 4, 2));
        for (const IndexSet& j : all_index_sets(2)) {
            const IndexSet comp = complement(j);
            Matrix sub(2, 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) sub(r, c) = phi.entries(comp.indices[r] - 1, c);
            CHECK(complementary_minor(phi, j) == doctest::Approx(perm_sum_det(sub)).epsilon(1e-12));
        }
    }
}

TEST_CASE("complementary minor alternates under complement-row swaps") {
    Rng rng(5);
    const IndexSet j(2, {2, 4});  // complement rows are 1 and 3
    Matrix m = random_matrix(rng, 4, 2);
    const double before = complementary_minor(StiefelPoint(2, m), j);
    for (int c = 0; c < 2; ++c) std::swap(m(0, c), m(2, c));
    const double after = complementary_minor(StiefelPoint(2, m), j);
    CHECK(after == doctest::Approx(-before).epsilon(1e-12));
}

TEST_CASE("gram of orthonormal and scaled blocks") {
    const GramData g = gram(identity_block(2));
    CHECK(g.det_U == doctest::Approx(1.0));
    CHECK(g.u == doctest::Approx(1.0));
    CHECK(g.U(0, 0) == doctest::Approx(1.0));
    CHECK(g.U(0, 1) == doctest::Approx(0.0));

    const GramData g2 = gram(identity_block(2, 2.0));
    CHECK(g2.det_U == doctest::Approx(16.0));
    CHECK(g2.u == doctest::Approx(0.25));
}

TEST_CASE("gram identity: det U equals the sum of squared row minors") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const StiefelPoint phi = random_stiefel(rng, 2, 1e-6);
        const GramData g = gram(phi);
        double sum = 0.0;
        for (const IndexSet& j : all_index_sets(2)) {
            const double m = row_minor(phi, j);
            sum += m * m;
        }
        CHECK(std::fabs(g.det_U - sum) / g.det_U < 1e-9);
    }
}

TEST_CASE("gram scaling: u(c phi) = c^-n u(phi)") {
    Rng rng(7);
    const StiefelPoint phi = random_stiefel(rng, 2);
    const double c = 1.7;
    Matrix scaled = phi.entries;
    for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 2; ++col) scaled(r, col) *= c;
    CHECK(gram(StiefelPoint(2, scaled)).u ==
          doctest::Approx(gram(phi).u / (c * c)).epsilon(1e-12));
}

TEST_CASE("gram inverse satisfies U U^-1 = I") {
    Rng rng(13);
    for (int n : {2, 3, 4}) {
        const StiefelPoint phi = random_stiefel(rng, n, 1e-6);
        const GramData g = gram(phi);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += g.U(r, k) * g.U_inv(k, c);
                CHECK(s == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-10));
            }
    }
}

TEST_CASE("gram rejects rank-deficient input") {
    Matrix m(4, 2);
    for (int r = 0; r < 4; ++r) {
        m(r, 0) = r + 1.0;
        m(r, 1) = 2.0 * (r + 1.0);  // second column is a multiple of the first
    }
    CHECK_THROWS_AS(gram(StiefelPoint(2, m)), RankDeficientError);
}

TEST_CASE("LU determinant matches the permutation sum up to 6x6") {
    Rng rng(23);
    for (int n : {2, 3, 4, 5, 6}) {
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix m = random_matrix(rng, n, n);
            const double expected = perm_sum_det(m);
            CHECK(determinant(m) == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("signed permutations") {
    const auto p1 = signed_permutations(1);
    REQUIRE(p1.size() == 1);
    CHECK(p1[0].second == 1);

    const auto p2 = signed_permutations(2);
    REQUIRE(p2.size() == 2);
    CHECK(p2[0].second + p2[1].second == 0);

    const auto p3 = signed_permutations(3);
    REQUIRE(p3.size() == 6);
    int sum = 0;
    for (const auto& [perm, sign] : p3) sum += sign;
    CHECK(sum == 0);

    CHECK_THROWS_AS(signed_permutations(9), TooLargeError);
}

TEST_CASE("generalized Laplace expansion with the complementary-minor signs") {
    // For K = [phi^T (top) ; B (bottom)]:
    //   det K = sum_J (-1)^{mu(J)} M_J(phi) det(B[:, J])   (n even)
    // This pins the sign conventions the form evaluator relies on.
    Rng rng(301);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2;
        const StiefelPoint phi(n, random_matrix(rng, 2 * n, n));
        const Matrix bottom = random_matrix(rng, n, 2 * n);
        Matrix k(2 * n, 2 * n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < 2 * n; ++c) {
                k(r, c) = phi.entries(c, r);
                k(n + r, c) = bottom(r, c);
            }
        double expansion = 0.0;
        for (const IndexSet& j : all_index_sets(n)) {
            Matrix sub(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) sub(r, c) = bottom(r, j.indices[c] - 1);
            const double sign = (sign_exponent(j) % 2 == 0) ? 1.0 : -1.0;
            expansion += sign * complementary_minor(phi, j) * perm_sum_det(sub);
        }
        CHECK(perm_sum_det(k) == doctest::Approx(expansion).epsilon(1e-11));
    }
}

#ifndef IMMINDEX_INTERSECTIONS_HPP
#define IMMINDEX_INTERSECTIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "immindex/immersion.hpp"
#include "immindex/quadrature.hpp"

namespace immindex {

/// One simple transversal self-intersection f(x1) = f(x2) = a, x1 != x2.
/// sign is the sign of the 2n x 2n determinant stacking the Jacobian rows at
/// preimage_1 over those at preimage_2; for n = 1 the preimages are ordered
/// ascending first, for n even the sign is order-independent.
struct IntersectionRecord {
    std::vector<double> ambient_point;  // 2n
    std::vector<double> preimage_1;     // n (lexicographically smaller)
    std::vector<double> preimage_2;     // n
    int sign = 0;
    double transversality_det = 0.0;
    double residual = 0.0;  // |f(x1) - f(x2)|
};

struct SolverConfig {
    int grid_points_per_axis = 0;  // 0 = default by dimension (9 for n <= 2, 5 / 3 above)
    double domain_halfwidth = 1.1;
    double diagonal_exclusion = 0.05;
    int newton_max_iter = 50;
    double newton_tol = 1e-10;      // accepted residual |f(x) - f(y)|
    double cluster_radius = 1e-6;
    double transversality_threshold = 1e-6;
    bool verify_completeness = true;  // rerun on the doubled grid and compare

    void validate(int n) const;
    int effective_grid(int n) const;
};

struct FinderDiagnostics {
    long seeds = 0;
    long converged = 0;
    long diagonal_discards = 0;
    bool completeness_warning = false;
    std::string note;
};

/// Finds all self-intersections by multistart damped Gauss-Newton on
/// F(x, y) = f(x) - f(y) seeded on a uniform grid, discarding the diagonal
/// continuum, clustering converged roots, and certifying each survivor
/// (residual < newton_tol, transversality above threshold). Records come out
/// sorted by preimage coordinates. Throws NonTransversalError when a genuine
/// root fails the transversality test.
std::vector<IntersectionRecord> find_self_intersections(const Immersion& f, const SolverConfig& cfg,
                                                        FinderDiagnostics* diag = nullptr);

/// Sign of the stacked-Jacobian determinant at the record's preimages,
/// recomputed from fresh Jacobian evaluations. n even or n = 1 (ascending
/// order enforced); throws OddDimensionError for odd n >= 3 and
/// DegenerateDeterminantError when |det| falls below the threshold.
int sign_of_intersection(const IntersectionRecord& rec, const Immersion& f,
                         double degenerate_threshold = 1e-12);

/// Sum of intersection signs: an integer for n even and n = 1, the parity of
/// the intersection count for odd n >= 3 (method "parity").
IndexReport index_by_signs(const Immersion& f, const SolverConfig& cfg,
                           FinderDiagnostics* diag = nullptr);

}  // namespace immindex

#endif

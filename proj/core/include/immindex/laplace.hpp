#ifndef IMMINDEX_LAPLACE_HPP
#define IMMINDEX_LAPLACE_HPP

#include <vector>

#include "immindex/immersion.hpp"
#include "immindex/intersections.hpp"
#include "immindex/quadrature.hpp"

namespace immindex {

/// Consistency report for the Laplace integral
///   J(f) = int exp(-lambda |f(x)-f(y)|^2 / 2) det[D_f(x); D_f(y)] dx dy,
/// which vanishes identically, against its two leading localized
/// contributions: the diagonal x = y (worth -2 (2pi/lambda)^n times the raw
/// integral-formula index) and the self-intersection pairs (worth
/// +2 (2pi/lambda)^n times the sign-sum index).
///
/// defect = diag_value + selfint_value is the measured failure of the
/// leading-order cancellation; it would be exactly 0 if both index routes
/// agreed exactly. remainder = J_value - defect additionally folds in the
/// integral itself (true magnitude O(lambda^{-n-1}), here far below the
/// 4-dimensional quadrature floor). The normalized_* fields divide by the
/// localization scale 2 (2pi/lambda)^n.
struct LaplaceReport {
    double lambda = 0.0;
    double J_value = 0.0;
    double diag_value = 0.0;
    double selfint_value = 0.0;
    double defect = 0.0;
    double normalized_defect = 0.0;
    double remainder = 0.0;
    double normalized_remainder = 0.0;
    double J_error_estimate = 0.0;
    std::int64_t evaluations = 0;
    bool budget_exhausted = false;
};

/// The Laplace integral itself. Integration runs over the box where the
/// integrand can be nonzero: with both points outside the support cube the
/// stacked determinant vanishes identically, and the Gaussian factor is
/// truncated where it drops below 1e-14 of its peak.
QuadratureResult laplace_J(const Immersion& f, double lambda, const QuadratureConfig& cfg);

/// Full decomposition at one lambda. The solver configuration drives the
/// sign-sum side; the index-route integral uses `index_cfg`.
LaplaceReport laplace_decomposition(const Immersion& f, double lambda, const QuadratureConfig& cfg,
                                    const QuadratureConfig& index_cfg, const SolverConfig& solver_cfg);

/// Sweep over several lambdas, computing the lambda-independent pieces once.
std::vector<LaplaceReport> laplace_sweep(const Immersion& f, const std::vector<double>& lambdas,
                                         const QuadratureConfig& cfg, const QuadratureConfig& index_cfg,
                                         const SolverConfig& solver_cfg);

}  // namespace immindex

#endif

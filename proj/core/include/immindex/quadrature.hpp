#ifndef IMMINDEX_QUADRATURE_HPP
#define IMMINDEX_QUADRATURE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "immindex/errors.hpp"
#include "immindex/immersion.hpp"

namespace immindex {

inline constexpr int kMaxQuadDim = 8;

/// Axis-aligned integration box, dimension <= 8.
struct Box {
    int dim = 0;
    std::array<double, kMaxQuadDim> lo{};
    std::array<double, kMaxQuadDim> hi{};

    static Box cube(int dim, double halfwidth);
    double volume() const;
};

struct QuadratureConfig {
    double abs_tol = 1e-4;
    double rel_tol = 1e-4;
    int max_subdivisions = 50000;
    int rule_order = 7;  // Gauss-Legendre points per axis per cell, in {3..15}
    // Uniform pre-partition per axis before adaptivity starts. Needed when
    // the integrand has features the root cell's rule cannot sense (narrow
    // ridges): error estimates of cells that miss a feature are spuriously
    // tiny and the refinement would stop at once.
    int initial_splits_per_axis = 1;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::int64_t evaluations = 0;
    bool budget_exhausted = false;
};

/// One cell estimate from a pair of nested-quality rules; |high - low| is the
/// cell's error estimate and `high` its value.
struct CellEstimate {
    double value_high = 0.0;
    double value_low = 0.0;
    std::int64_t evaluations = 0;
};

/// Rule evaluations must be pure: cells are processed in parallel batches.
class CellRule {
public:
    virtual ~CellRule() = default;
    virtual CellEstimate evaluate(const Box& cell) const = 0;
};

/// Globally adaptive subdivision: repeatedly split the cell with the largest
/// error estimate along its widest axis, evaluating each cell with the given
/// rule, until the accumulated error meets max(abs_tol, rel_tol * |value|) or
/// the subdivision budget runs out (then budget_exhausted is set and the best
/// estimate is still returned). Deterministic for a fixed config regardless
/// of the worker-thread count.
QuadratureResult integrate_adaptive_rule(const CellRule& rule, const Box& box,
                                         const QuadratureConfig& cfg);

/// Point-function front end: tensor Gauss-Legendre of cfg.rule_order with an
/// embedded lower-order companion as the error reference.
QuadratureResult integrate_adaptive(const std::function<double(const double*)>& g, const Box& box,
                                    const QuadratureConfig& cfg);

/// Gauss-Legendre nodes/weights on [-1, 1], order 1..15, cached.
const std::vector<double>& gauss_nodes(int order);
const std::vector<double>& gauss_weights(int order);

/// Index computation report. `index` is meaningful only when index_valid:
/// rounding is refused (RoundingAmbiguous) when the raw value sits further
/// than 0.1 from any integer. For the parity method (odd n >= 3), raw_value
/// is the intersection count and index its residue mod 2.
struct IndexReport {
    std::string method;  // "sign-sum" | "integral" | "whitney-1d" | "parity"
    double raw_value = 0.0;
    long index = 0;
    bool index_valid = false;
    double residual = 0.0;
    double error_estimate = 0.0;
    std::int64_t evaluations = 0;
    bool budget_exhausted = false;
};

/// Rounds raw to the nearest integer, refusing when the residual is >= 0.1.
IndexReport make_rounded_report(std::string method, double raw, double error_estimate,
                                std::int64_t evaluations, bool budget_exhausted);

/// Integral of the pullback integrand over the (slightly padded) support
/// cube; exact outside because the integrand vanishes there identically.
/// n even only.
IndexReport index_by_integral(const Immersion& f, const QuadratureConfig& cfg);

/// Same integral through the direct coordinate route; used by the Laplace
/// decomposition and as a cross-check.
QuadratureResult integral_index_direct_route(const Immersion& f, const QuadratureConfig& cfg);

/// (1/2pi) integral of the 1-D rotation integrand over the support interval,
/// rounded. n = 1 only.
IndexReport index_whitney_1d(const Immersion& f, const QuadratureConfig& cfg);

}  // namespace immindex

#endif

#ifndef IMMINDEX_STIEFEL_FORM_HPP
#define IMMINDEX_STIEFEL_FORM_HPP

#include <functional>
#include <span>
#include <vector>

#include "immindex/immersion.hpp"
#include "immindex/linalg.hpp"

namespace immindex {

/// Tangent to V(n,2n) at any point: V(n,2n) is open in matrix space, so a
/// tangent is an arbitrary 2n x n matrix.
struct TangentVector {
    int n = 0;
    Matrix entries;  // 2n x n

    TangentVector() = default;
    TangentVector(int n_, Matrix m);
};

/// A form evaluation together with the largest magnitude among the terms of
/// its defining sum. The scale is what finite-difference closedness residuals
/// are normalized against: a residual of 1e-4 * scale is "zero" relative to
/// the cancellations the evaluation went through.
struct FormValue {
    double value = 0.0;
    double term_scale = 0.0;
};

/// A degree-k form on V(n,2n) as a callable on (point, k tangents).
using StiefelForm = std::function<FormValue(const StiefelPoint&, std::span<const TangentVector>)>;

/// Evaluates the index n-form at phi on n tangent vectors:
///
///   -(1/(2^{n+1} pi^{n/2} (n/2)!)) u(phi)
///      sum_{i_1..i_n} u_{i_1 i_2} ... u_{i_{n-1} i_n}
///      sum_{sigma} sum_J (-1)^{mu(J)} M_J(phi)
///           det[ T_b(j_a, i_{sigma(a)}) ]_{a,b}
///
/// with M_J the complementary minor and u, u_{ij} the Gram data of phi. Only
/// defined for n even; throws OddDimensionError otherwise and propagates
/// RankDeficientError from the Gram step.
FormValue omega_eval_detailed(const StiefelPoint& phi, std::span<const TangentVector> tangents);
double omega_eval(const StiefelPoint& phi, std::span<const TangentVector> tangents);

/// The index form packaged as a StiefelForm.
StiefelForm omega_form();

/// omega plus epsilon * phi(2,1) dphi(1,1) ^ dphi(1,2)  (indices 1-based),
/// an intentionally non-closed perturbation used to prove the closedness
/// detector can fail. n = 2 only.
StiefelForm perturbed_omega_form(double epsilon);

/// Coefficient of dx_1 ^ ... ^ dx_n of the pullback of omega along the
/// differential of f at x: omega evaluated at D_f(x) on the Hessian slices
/// T_k(j, i) = H(j, i, k).
double integrand_pullback(const Immersion& f, const double* x);

/// The same coefficient by the direct coordinate formula:
///
///   -(1/(2^{n+1} pi^{n/2} (n/2)!)) g(x)
///      sum_{i_1..i_n} g_{i_1 i_2} ... g_{i_{n-1} i_n}
///      sum_{sigma} det[ df_j/dx_k ; d^2 f_j / dx_k dx_{i_sigma(k)} ]
///
/// (2n x 2n determinants stacking n Jacobian rows over n Hessian rows).
/// Pointwise equal to integrand_pullback; kept as an independent route.
double integrand_direct(const Immersion& f, const double* x);

/// Rotation integrand of a long plane curve:
///   (f1'' f2' - f2'' f1') / (f1'^2 + f2'^2).
/// Throws RankDeficientError where both derivatives vanish.
double whitney_integrand_1d(const Immersion& f, double x);

/// Numerical exterior derivative of a degree-n form on constant tangent
/// fields: d form (T_0..T_n) = sum_i (-1)^i D_{T_i} [ form(.)(T_0..^T_i..T_n) ],
/// each directional derivative by a central difference with displacement
/// h * |phi|_F along T_i / |T_i|_F. Lie bracket terms vanish for constant
/// fields on an open subset of matrix space. If the stencil leaves the
/// full-rank locus the step is shrunk once before giving up. With
/// `richardson` set, the h and h/2 stencils are extrapolated
/// ((4 D_{h/2} - D_h)/3), trading 2x the evaluations for an O(h^4) error.
FormValue exterior_derivative_fd(const StiefelForm& form, const StiefelPoint& phi,
                                 std::span<const TangentVector> tangents, double h,
                                 bool richardson = false);
FormValue exterior_derivative_fd(const StiefelPoint& phi, std::span<const TangentVector> tangents,
                                 double h, bool richardson = false);

/// Seeded random sweep of |d omega| / term scale over `samples` draws with
/// entries in [-2, 2], resampling points with det U <= det_u_min.
struct ClosednessCheck {
    int samples = 0;
    double max_normalized = 0.0;
    double threshold = 0.0;
    bool pass = true;
};
ClosednessCheck run_closedness_check(int n, int samples, std::uint64_t seed, double h,
                                     double threshold, double det_u_min = 1e-3,
                                     const StiefelForm* form = nullptr);

}  // namespace immindex

#endif

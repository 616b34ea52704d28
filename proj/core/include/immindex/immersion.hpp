#ifndef IMMINDEX_IMMERSION_HPP
#define IMMINDEX_IMMERSION_HPP

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "immindex/errors.hpp"
#include "immindex/linalg.hpp"

namespace immindex {

/// Hard cap on the domain dimension; keeps evaluation buffers on the stack.
inline constexpr int kMaxDomainDim = 8;

/// C-infinity bump on [center - halfwidth, center + halfwidth], built on the
/// standard exp(-1/(1-t^2)) profile. Identically zero (exactly, including all
/// derivatives) outside the closed support interval.
class BumpFunction {
public:
    BumpFunction(double center, double halfwidth, double amplitude);

    double center() const { return center_; }
    double halfwidth() const { return halfwidth_; }
    double amplitude() const { return amplitude_; }

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

private:
    double center_;
    double halfwidth_;
    double amplitude_;
};

/// Worst deviation between analytic derivatives and central finite
/// differences of the map values, over random sample points.
struct DerivativeValidation {
    double max_jacobian_deviation = 0.0;
    std::vector<double> jacobian_worst_point;
    double max_hessian_deviation = 0.0;
    std::vector<double> hessian_worst_point;
    int samples = 0;
    double h = 0.0;
};

/// A smooth map R^n -> R^2n fixed at infinity: f(x) = (x, 0) exactly whenever
/// max_i |x_i| >= support_halfwidth. Carries analytic value, Jacobian and
/// Hessian evaluators.
///
/// Buffer layouts (out parameters, caller-allocated):
///   value:    out[j],            j < 2n
///   jacobian: out[j*n + i]     = d f_j / d x_i
///   hessian:  out[(j*n+k)*n+l] = d^2 f_j / d x_k d x_l   (symmetric in k,l)
class Immersion {
public:
    using MapFn = std::function<void(const double* x, double* out)>;

    Immersion() = default;

    static Immersion from_callables(int n, double support_halfwidth, MapFn value, MapFn jacobian,
                                    MapFn hessian);

    /// Black-box input: only values are available; Jacobian and Hessian fall
    /// back to Richardson-extrapolated central differences (h = 1e-4, one
    /// extrapolation level).
    static Immersion from_value_only(int n, double support_halfwidth, MapFn value);

    int dim() const { return n_; }
    int ambient_dim() const { return 2 * n_; }
    double support_halfwidth() const { return halfwidth_; }

    void value(const double* x, double* out) const { value_(x, out); }
    void jacobian(const double* x, double* out) const { jacobian_(x, out); }
    void hessian(const double* x, double* out) const { hessian_(x, out); }

    std::vector<double> value_at(std::span<const double> x) const;
    StiefelPoint differential_at(std::span<const double> x) const;
    std::vector<double> hessian_at(std::span<const double> x) const;

    /// The canonical double point f(p1) = f(p2) of the one-loop family, when
    /// this immersion was built with one. Cleared by builders that do not
    /// preserve it.
    const std::optional<std::array<std::vector<double>, 2>>& marked_double_point() const {
        return marked_;
    }
    void set_marked_double_point(std::vector<double> p1, std::vector<double> p2);
    void clear_marked_double_point() { marked_.reset(); }

private:
    int n_ = 0;
    double halfwidth_ = 1.0;
    MapFn value_, jacobian_, hessian_;
    std::optional<std::array<std::vector<double>, 2>> marked_;
};

/// The standard embedding x -> (x, 0). No self-intersections, zero Hessian.
Immersion trivial_immersion(int n);

/// A long plane curve with exactly one (transversal) double point, realized
/// at parameters -1/2 and 1/2. The construction perturbs the line by two
/// bumps supported in [-s, s], s = 0.8:
///     f(x) = (x + A * (x/s) b(x/s),  B * b(x/s)),   b(u) = exp(-1/(1-u^2)),
/// with A fixed so that f(-1/2) = f(1/2) and B = 0.35. Since b is even and
/// strictly decreasing in |u|, the double-point pair {-1/2, 1/2} is provably
/// the only one.
Immersion one_loop_curve();

/// One-dimension lift of an immersion carrying its sole self-intersection at
/// the marked pair (-1/2, 0, ..., 0) / (1/2, 0, ..., 0). The (n+1)-map keeps
/// the double point at the same coordinates (with the new variable at 0) and
/// is fixed at infinity: the curve block is shut down by a smooth plateau in
/// the new variable, and the separating coordinate couples the new variable
/// to phi(x_1) through an odd window vanishing outside |t| < 0.95.
///
/// Throws PreimageMismatchError when the marked pair is missing or not in
/// canonical position, when bump(-1/2) == bump(1/2), when the bump support
/// leaves [-1, 1], or (for curve bases) when the bump fails to separate the
/// symmetric pairs swept by the shutdown homotopy.
Immersion lift(const Immersion& f, const BumpFunction& bump);

/// Concatenation product: a squeezed copy of f1 on {x_1 <= 0} and of f2 on
/// {x_1 >= 0}. Domain reparametrization x_1 -> 2 x_1 -+ 1 composed with the
/// inverse shift/scale of the first ambient coordinate, so the result is
/// again fixed at infinity. Self-intersections of the factors survive with
/// their signs (both composed diffeomorphisms preserve orientation).
Immersion concat(const Immersion& f1, const Immersion& f2);

/// Reflects the last ambient coordinate; reverses the ambient orientation,
/// so every intersection sign and hence the index is negated.
Immersion mirror_last_coordinate(const Immersion& f);

/// Adds amplitude * prod_i b((x_i - center_i)/halfwidth) to one ambient
/// coordinate (1-based). The bump box must lie strictly inside the support
/// cube. Used as a small interior perturbation for homotopy-invariance
/// probes; clears the marked double point.
Immersion perturb(const Immersion& f, int ambient_coordinate, double amplitude,
                  const std::vector<double>& center, double halfwidth);

/// Compares analytic Jacobian/Hessian against central finite differences of
/// the value map at `samples` seeded-random points of the support box.
DerivativeValidation validate_derivatives(const Immersion& f, int samples, double h,
                                          std::uint64_t seed = 12345);

}  // namespace immindex

#endif

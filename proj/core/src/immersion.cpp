#include "immindex/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "immindex/rng.hpp"

namespace immindex {

namespace {

struct D2 {
    double v = 0.0;   // value
    double d1 = 0.0;  // first derivative
    double d2 = 0.0;  // second derivative
};

/// Standard bump profile b(u) = exp(-1/(1-u^2)) on (-1,1), 0 outside.
D2 bump_profile(double u) {
    if (!(std::fabs(u) < 1.0)) return {};
    const double w = 1.0 / (1.0 - u * u);
    const double e = std::exp(-w);
    D2 r;
    r.v = e;
    r.d1 = -2.0 * u * w * w * e;
    r.d2 = (-2.0 * w * w - 8.0 * u * u * w * w * w + 4.0 * u * u * w * w * w * w) * e;
    return r;
}

/// Smooth step: 0 for s <= 0, 1 for s >= 1, a(s)/(a(s)+a(1-s)) in between,
/// with a(s) = exp(-1/s). Closed-form first and second derivatives.
D2 smooth_step(double s) {
    if (s <= 0.0) return {};
    if (s >= 1.0) return {1.0, 0.0, 0.0};
    const double A = std::exp(-1.0 / s);
    const double B = std::exp(-1.0 / (1.0 - s));
    const double D = A + B;
    if (D == 0.0) return {};  // deep underflow on both sides; unreachable for s in (0,1)
    const double s2 = s * s;
    const double t = 1.0 - s;
    const double t2 = t * t;
    const double Ap = A / s2;
    const double Bp = -B / t2;
    const double App = A * (1.0 / (s2 * s2) - 2.0 / (s2 * s));
    const double Bpp = B * (1.0 / (t2 * t2) - 2.0 / (t2 * t));
    D2 r;
    r.v = A / D;
    const double num1 = Ap * B - A * Bp;
    r.d1 = num1 / (D * D);
    r.d2 = (App * B - A * Bpp) / (D * D) - 2.0 * num1 * (Ap + Bp) / (D * D * D);
    return r;
}

/// Even plateau window: 1 on [-t0, t0], 0 outside (-t1, t1).
D2 plateau(double t, double t0, double t1) {
    const double at = std::fabs(t);
    if (at <= t0) return {1.0, 0.0, 0.0};
    if (at >= t1) return {};
    const double inv = 1.0 / (t1 - t0);
    const double s = (t1 - at) * inv;
    const D2 step = smooth_step(s);
    const double ds = (t > 0.0 ? -inv : inv);
    return {step.v, step.d1 * ds, step.d2 * inv * inv};
}

// Shutdown window of the lift: flat until |t| = 0.5, gone at |t| = 0.95.
constexpr double kWindowFlat = 0.5;
constexpr double kWindowEnd = 0.95;

D2 lift_window(double t) { return plateau(t, kWindowFlat, kWindowEnd); }

/// Odd coupling factor sigma(t) = t * window(t): vanishes only at t = 0
/// inside (-0.95, 0.95), identically zero outside, sigma'(0) = 1.
D2 lift_coupling(double t) {
    const D2 c = lift_window(t);
    return {t * c.v, c.v + t * c.d1, 2.0 * c.d1 + t * c.d2};
}

constexpr double kLoopSupport = 0.8;
constexpr double kLoopHeight = 0.35;

double loop_a_coefficient() {
    // Fixed so that f1(1/2) = 0, which makes {-1/2, 1/2} the unique
    // double-point pair of the curve.
    static const double a = [] {
        const double u = 1.0 / (2.0 * kLoopSupport);
        return -kLoopSupport / bump_profile(u).v;
    }();
    return a;
}

}  // namespace

BumpFunction::BumpFunction(double center, double halfwidth, double amplitude)
    : center_(center), halfwidth_(halfwidth), amplitude_(amplitude) {
    if (!(halfwidth > 0.0)) throw ConfigError("BumpFunction: halfwidth must be positive");
}

double BumpFunction::value(double x) const {
    return amplitude_ * bump_profile((x - center_) / halfwidth_).v;
}

double BumpFunction::derivative(double x) const {
    return amplitude_ * bump_profile((x - center_) / halfwidth_).d1 / halfwidth_;
}

double BumpFunction::second_derivative(double x) const {
    return amplitude_ * bump_profile((x - center_) / halfwidth_).d2 / (halfwidth_ * halfwidth_);
}

Immersion Immersion::from_callables(int n, double support_halfwidth, MapFn value, MapFn jacobian,
                                    MapFn hessian) {
    if (n < 1 || n > kMaxDomainDim) throw TooLargeError("Immersion: dimension out of range [1, 8]");
    if (!(support_halfwidth > 0.0)) throw ConfigError("Immersion: support halfwidth must be positive");
    Immersion f;
    f.n_ = n;
    f.halfwidth_ = support_halfwidth;
    f.value_ = std::move(value);
    f.jacobian_ = std::move(jacobian);
    f.hessian_ = std::move(hessian);
    return f;
}

Immersion Immersion::from_value_only(int n, double support_halfwidth, MapFn value) {
    const double h = 1e-4;
    const int m = 2 * n;
    auto jac = [n, m, value, h](const double* x, double* out) {
        std::vector<double> p(n), fp(m), fm(m), fp2(m), fm2(m);
        for (int i = 0; i < n; ++i) {
            std::copy(x, x + n, p.begin());
            p[i] = x[i] + h;
            value(p.data(), fp.data());
            p[i] = x[i] - h;
            value(p.data(), fm.data());
            p[i] = x[i] + 2 * h;
            value(p.data(), fp2.data());
            p[i] = x[i] - 2 * h;
            value(p.data(), fm2.data());
            for (int j = 0; j < m; ++j) {
                const double d_h = (fp[j] - fm[j]) / (2 * h);
                const double d_2h = (fp2[j] - fm2[j]) / (4 * h);
                out[j * n + i] = (4.0 * d_h - d_2h) / 3.0;  // one Richardson level
            }
        }
    };
    auto hess = [n, m, value, h](const double* x, double* out) {
        std::vector<double> p(n), f0(m), a(m), b(m), c(m), d(m);
        value(x, f0.data());
        auto second = [&](int k, int l, double step, double* acc) {
            std::copy(x, x + n, p.begin());
            if (k == l) {
                p[k] = x[k] + step;
                value(p.data(), a.data());
                p[k] = x[k] - step;
                value(p.data(), b.data());
                for (int j = 0; j < m; ++j) acc[j] = (a[j] - 2.0 * f0[j] + b[j]) / (step * step);
            } else {
                p[k] = x[k] + step;
                p[l] = x[l] + step;
                value(p.data(), a.data());
                p[l] = x[l] - step;
                value(p.data(), b.data());
                p[k] = x[k] - step;
                value(p.data(), c.data());
                p[l] = x[l] + step;
                value(p.data(), d.data());
                for (int j = 0; j < m; ++j)
                    acc[j] = (a[j] - b[j] + c[j] - d[j]) / (4.0 * step * step);
            }
        };
        std::vector<double> s1(m), s2(m);
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                second(k, l, h, s1.data());
                second(k, l, 2 * h, s2.data());
                for (int j = 0; j < m; ++j) {
                    const double v = (4.0 * s1[j] - s2[j]) / 3.0;
                    out[(size_t(j) * n + k) * n + l] = v;
                    out[(size_t(j) * n + l) * n + k] = v;
                }
            }
    };
    return from_callables(n, support_halfwidth, std::move(value), std::move(jac), std::move(hess));
}

std::vector<double> Immersion::value_at(std::span<const double> x) const {
    if (int(x.size()) != n_) throw DimensionMismatchError("value_at: wrong point dimension");
    std::vector<double> out(2 * n_);
    value_(x.data(), out.data());
    return out;
}

StiefelPoint Immersion::differential_at(std::span<const double> x) const {
    if (int(x.size()) != n_) throw DimensionMismatchError("differential_at: wrong point dimension");
    std::vector<double> buf(size_t(2 * n_) * n_);
    jacobian_(x.data(), buf.data());
    Matrix m(2 * n_, n_);
    for (int j = 0; j < 2 * n_; ++j)
        for (int i = 0; i < n_; ++i) m(j, i) = buf[size_t(j) * n_ + i];
    return StiefelPoint(n_, std::move(m));
}

std::vector<double> Immersion::hessian_at(std::span<const double> x) const {
    if (int(x.size()) != n_) throw DimensionMismatchError("hessian_at: wrong point dimension");
    std::vector<double> out(size_t(2 * n_) * n_ * n_);
    hessian_(x.data(), out.data());
    return out;
}

void Immersion::set_marked_double_point(std::vector<double> p1, std::vector<double> p2) {
    if (int(p1.size()) != n_ || int(p2.size()) != n_)
        throw DimensionMismatchError("set_marked_double_point: wrong point dimension");
    marked_ = {std::move(p1), std::move(p2)};
}

Immersion trivial_immersion(int n) {
    if (n < 1 || n > kMaxDomainDim) throw TooLargeError("trivial_immersion: n out of range [1, 8]");
    auto value = [n](const double* x, double* out) {
        for (int i = 0; i < n; ++i) out[i] = x[i];
        for (int i = n; i < 2 * n; ++i) out[i] = 0.0;
    };
    auto jac = [n](const double*, double* out) {
        std::fill(out, out + size_t(2 * n) * n, 0.0);
        for (int i = 0; i < n; ++i) out[size_t(i) * n + i] = 1.0;
    };
    auto hess = [n](const double*, double* out) {
        std::fill(out, out + size_t(2 * n) * n * n, 0.0);
    };
    return Immersion::from_callables(n, 1.0, value, jac, hess);
}

Immersion one_loop_curve() {
    const double s = kLoopSupport;
    const double a = loop_a_coefficient();
    const double b = kLoopHeight;
    auto value = [s, a, b](const double* x, double* out) {
        const D2 p = bump_profile(x[0] / s);
        const double u = x[0] / s;
        out[0] = x[0] + a * u * p.v;
        out[1] = b * p.v;
    };
    auto jac = [s, a, b](const double* x, double* out) {
        const double u = x[0] / s;
        const D2 p = bump_profile(u);
        out[0] = 1.0 + a * (p.v + u * p.d1) / s;
        out[1] = b * p.d1 / s;
    };
    auto hess = [s, a, b](const double* x, double* out) {
        const double u = x[0] / s;
        const D2 p = bump_profile(u);
        out[0] = a * (2.0 * p.d1 + u * p.d2) / (s * s);
        out[1] = b * p.d2 / (s * s);
    };
    Immersion f = Immersion::from_callables(1, s, value, jac, hess);
    f.set_marked_double_point({-0.5}, {0.5});
    return f;
}

Immersion lift(const Immersion& f, const BumpFunction& bump) {
    const int bn = f.dim();
    const int m = bn + 1;
    if (m > kMaxDomainDim) throw TooLargeError("lift: resulting dimension exceeds the cap of 8");

    const auto& marked = f.marked_double_point();
    if (!marked) throw PreimageMismatchError("lift: base immersion carries no marked double point");
    for (int i = 0; i < bn; ++i) {
        const double want = (i == 0) ? 0.5 : 0.0;
        if (std::fabs(std::fabs((*marked)[0][i]) - want) > 1e-12 ||
            std::fabs(std::fabs((*marked)[1][i]) - want) > 1e-12 ||
            ((*marked)[0][0]) * ((*marked)[1][0]) >= 0.0)
            throw PreimageMismatchError(
                "lift: marked preimages must be (-1/2, 0, ..., 0) and (1/2, 0, ..., 0)");
    }
    if (std::fabs(bump.center()) + bump.halfwidth() > 1.0 + 1e-12)
        throw PreimageMismatchError("lift: bump support must lie inside [-1, 1]");
    if (bump.value(-0.5) == bump.value(0.5))
        throw PreimageMismatchError("lift: bump must separate the branches, bump(-1/2) != bump(1/2)");
    if (bn == 1) {
        // The shutdown homotopy sweeps the curve through symmetric near-pairs
        // (s, -s); the bump must tell those apart all the way to the support
        // edge. Sufficient: support straddles 0, is off-center, and reaches
        // past the curve support.
        if (bump.center() == 0.0 || std::fabs(bump.center()) >= bump.halfwidth() ||
            std::fabs(bump.center()) + bump.halfwidth() <= f.support_halfwidth())
            throw PreimageMismatchError(
                "lift: bump cannot separate symmetric pairs (need 0 < |center| < halfwidth and "
                "|center| + halfwidth > base support halfwidth)");
    }

    const double r_out =
        std::max({f.support_halfwidth(), kWindowEnd, std::fabs(bump.center()) + bump.halfwidth()});
    Immersion base = f;  // captured by value below

    auto value = [base, bump, bn, m](const double* x, double* out) {
        double bval[2 * kMaxDomainDim];
        base.value(x, bval);
        const double t = x[bn];
        const double c = lift_window(t).v;
        const double sg = lift_coupling(t).v;
        for (int k = 0; k < bn; ++k) out[k] = x[k] + (bval[k] - x[k]) * c;
        out[bn] = t;
        for (int l = 0; l < bn; ++l) out[bn + 1 + l] = bval[bn + l] * c;
        double prod = bump.value(x[0]);
        for (int j = 1; j < bn; ++j) prod *= plateau(x[j], kWindowFlat, kWindowEnd).v;
        out[2 * m - 1] = sg * prod;
    };

    auto jac = [base, bump, bn, m](const double* x, double* out) {
        double bval[2 * kMaxDomainDim];
        double bjac[2 * kMaxDomainDim * kMaxDomainDim];
        base.value(x, bval);
        base.jacobian(x, bjac);
        const double t = x[bn];
        const D2 c = lift_window(t);
        const D2 sg = lift_coupling(t);
        for (int k = 0; k < bn; ++k) {
            for (int i = 0; i < bn; ++i) {
                const double delta = (k == i) ? 1.0 : 0.0;
                out[size_t(k) * m + i] = delta + (bjac[size_t(k) * bn + i] - delta) * c.v;
            }
            out[size_t(k) * m + bn] = (bval[k] - x[k]) * c.d1;
        }
        for (int i = 0; i < bn; ++i) out[size_t(bn) * m + i] = 0.0;
        out[size_t(bn) * m + bn] = 1.0;
        for (int l = 0; l < bn; ++l) {
            for (int i = 0; i < bn; ++i)
                out[size_t(bn + 1 + l) * m + i] = bjac[size_t(bn + l) * bn + i] * c.v;
            out[size_t(bn + 1 + l) * m + bn] = bval[bn + l] * c.d1;
        }
        // last row: sigma(t) * phi(x_0) * prod_j rho(x_j)
        const double phi = bump.value(x[0]);
        const double dphi = bump.derivative(x[0]);
        double rho[kMaxDomainDim];
        double prod = 1.0;
        for (int j = 1; j < bn; ++j) {
            rho[j] = plateau(x[j], kWindowFlat, kWindowEnd).v;
            prod *= rho[j];
        }
        const size_t last = size_t(2 * m - 1) * m;
        out[last + 0] = sg.v * dphi * prod;
        for (int j = 1; j < bn; ++j) {
            double others = 1.0;
            for (int j2 = 1; j2 < bn; ++j2)
                if (j2 != j) others *= rho[j2];
            out[last + j] = sg.v * phi * plateau(x[j], kWindowFlat, kWindowEnd).d1 * others;
        }
        out[last + bn] = sg.d1 * phi * prod;
    };

    auto hess = [base, bump, bn, m](const double* x, double* out) {
        double bval[2 * kMaxDomainDim];
        double bjac[2 * kMaxDomainDim * kMaxDomainDim];
        double bhess[2 * kMaxDomainDim * kMaxDomainDim * kMaxDomainDim];
        base.value(x, bval);
        base.jacobian(x, bjac);
        base.hessian(x, bhess);
        const double t = x[bn];
        const D2 c = lift_window(t);
        const D2 sg = lift_coupling(t);
        const size_t mm = size_t(m) * m;
        std::fill(out, out + size_t(2 * m) * mm, 0.0);
        for (int k0 = 0; k0 < bn; ++k0) {
            double* h = out + size_t(k0) * mm;
            for (int k = 0; k < bn; ++k) {
                for (int l = 0; l < bn; ++l)
                    h[size_t(k) * m + l] = bhess[(size_t(k0) * bn + k) * bn + l] * c.v;
                const double delta = (k0 == k) ? 1.0 : 0.0;
                const double v = (bjac[size_t(k0) * bn + k] - delta) * c.d1;
                h[size_t(k) * m + bn] = v;
                h[size_t(bn) * m + k] = v;
            }
            h[size_t(bn) * m + bn] = (bval[k0] - x[k0]) * c.d2;
        }
        // row bn (the new flat coordinate) stays zero
        for (int l0 = 0; l0 < bn; ++l0) {
            double* h = out + size_t(bn + 1 + l0) * mm;
            for (int k = 0; k < bn; ++k) {
                for (int l = 0; l < bn; ++l)
                    h[size_t(k) * m + l] = bhess[(size_t(bn + l0) * bn + k) * bn + l] * c.v;
                const double v = bjac[size_t(bn + l0) * bn + k] * c.d1;
                h[size_t(k) * m + bn] = v;
                h[size_t(bn) * m + k] = v;
            }
            h[size_t(bn) * m + bn] = bval[bn + l0] * c.d2;
        }
        {
            double* h = out + size_t(2 * m - 1) * mm;
            const double phi = bump.value(x[0]);
            const double dphi = bump.derivative(x[0]);
            const double ddphi = bump.second_derivative(x[0]);
            D2 rho[kMaxDomainDim];
            for (int j = 1; j < bn; ++j) rho[j] = plateau(x[j], kWindowFlat, kWindowEnd);
            auto prod_except = [&](int skip1, int skip2) {
                double p = 1.0;
                for (int j = 1; j < bn; ++j)
                    if (j != skip1 && j != skip2) p *= rho[j].v;
                return p;
            };
            const double prod = prod_except(-1, -1);
            h[0] = sg.v * ddphi * prod;  // (0,0)
            for (int j = 1; j < bn; ++j) {
                const double v = sg.v * dphi * rho[j].d1 * prod_except(j, -1);
                h[size_t(0) * m + j] = v;
                h[size_t(j) * m + 0] = v;
            }
            {
                const double v = sg.d1 * dphi * prod;
                h[size_t(0) * m + bn] = v;
                h[size_t(bn) * m + 0] = v;
            }
            for (int j = 1; j < bn; ++j) {
                for (int j2 = j; j2 < bn; ++j2) {
                    double v;
                    if (j == j2)
                        v = sg.v * phi * rho[j].d2 * prod_except(j, -1);
                    else
                        v = sg.v * phi * rho[j].d1 * rho[j2].d1 * prod_except(j, j2);
                    h[size_t(j) * m + j2] = v;
                    h[size_t(j2) * m + j] = v;
                }
                const double v = sg.d1 * phi * rho[j].d1 * prod_except(j, -1);
                h[size_t(j) * m + bn] = v;
                h[size_t(bn) * m + j] = v;
            }
            h[size_t(bn) * m + bn] = sg.d2 * phi * prod;
        }
    };

    Immersion out = Immersion::from_callables(m, r_out, value, jac, hess);
    std::vector<double> p1(m, 0.0), p2(m, 0.0);
    p1[0] = (*marked)[0][0];
    p2[0] = (*marked)[1][0];
    out.set_marked_double_point(std::move(p1), std::move(p2));
    return out;
}

Immersion concat(const Immersion& f1, const Immersion& f2) {
    if (f1.dim() != f2.dim()) throw DimensionMismatchError("concat: factors have different dimensions");
    if (f1.support_halfwidth() > 1.0 + 1e-12 || f2.support_halfwidth() > 1.0 + 1e-12)
        throw ConfigError("concat: factors must be supported inside the unit cube");
    const int n = f1.dim();
    Immersion left = f1, right = f2;

    auto pick = [left, right, n](const double* x, double arg[kMaxDomainDim]) -> const Immersion& {
        std::copy(x, x + n, arg);
        if (x[0] <= 0.0) {
            arg[0] = 2.0 * x[0] + 1.0;
            return left;
        }
        arg[0] = 2.0 * x[0] - 1.0;
        return right;
    };

    auto value = [pick](const double* x, double* out) {
        double arg[kMaxDomainDim];
        const Immersion& g = pick(x, arg);
        g.value(arg, out);
        // algebraically (out[0] -+ 1) / 2; this form is exact wherever the
        // factor is trivial (out[0] == arg[0] there), so the result is
        // literally (x, 0) outside the support
        out[0] = x[0] + (out[0] - arg[0]) * 0.5;
    };
    auto jac = [pick, n](const double* x, double* out) {
        double arg[kMaxDomainDim];
        const Immersion& g = pick(x, arg);
        g.jacobian(arg, out);
        for (int j = 0; j < 2 * n; ++j) {
            const double row = (j == 0) ? 0.5 : 1.0;
            for (int i = 0; i < n; ++i) out[size_t(j) * n + i] *= row * (i == 0 ? 2.0 : 1.0);
        }
    };
    auto hess = [pick, n](const double* x, double* out) {
        double arg[kMaxDomainDim];
        const Immersion& g = pick(x, arg);
        g.hessian(arg, out);
        for (int j = 0; j < 2 * n; ++j) {
            const double row = (j == 0) ? 0.5 : 1.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out[(size_t(j) * n + k) * n + l] *= row * (k == 0 ? 2.0 : 1.0) * (l == 0 ? 2.0 : 1.0);
        }
    };

    const double r = std::max({(1.0 + std::max(f1.support_halfwidth(), f2.support_halfwidth())) / 2.0,
                               f1.support_halfwidth(), f2.support_halfwidth()});
    return Immersion::from_callables(n, std::min(r, 1.0), value, jac, hess);
}

Immersion mirror_last_coordinate(const Immersion& f) {
    const int n = f.dim();
    const int last = 2 * n - 1;
    Immersion base = f;
    auto value = [base, last](const double* x, double* out) {
        base.value(x, out);
        out[last] = -out[last];
    };
    auto jac = [base, n, last](const double* x, double* out) {
        base.jacobian(x, out);
        for (int i = 0; i < n; ++i) out[size_t(last) * n + i] = -out[size_t(last) * n + i];
    };
    auto hess = [base, n, last](const double* x, double* out) {
        base.hessian(x, out);
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                out[(size_t(last) * n + k) * n + l] = -out[(size_t(last) * n + k) * n + l];
    };
    Immersion out = Immersion::from_callables(n, f.support_halfwidth(), value, jac, hess);
    if (f.marked_double_point())
        out.set_marked_double_point((*f.marked_double_point())[0], (*f.marked_double_point())[1]);
    return out;
}

Immersion perturb(const Immersion& f, int ambient_coordinate, double amplitude,
                  const std::vector<double>& center, double halfwidth) {
    const int n = f.dim();
    if (ambient_coordinate < 1 || ambient_coordinate > 2 * n)
        throw ConfigError("perturb: ambient coordinate out of range [1, 2n]");
    if (int(center.size()) != n) throw ConfigError("perturb: center must have the domain dimension");
    if (!(halfwidth > 0.0)) throw ConfigError("perturb: halfwidth must be positive");
    for (double c : center)
        if (std::fabs(c) + halfwidth >= f.support_halfwidth())
            throw ConfigError("perturb: bump box must lie strictly inside the support cube");
    const int jc = ambient_coordinate - 1;
    Immersion base = f;
    const std::vector<double> c0 = center;

    auto factors = [c0, halfwidth, n](const double* x, D2* b) {
        for (int i = 0; i < n; ++i) {
            b[i] = bump_profile((x[i] - c0[i]) / halfwidth);
            b[i].d1 /= halfwidth;
            b[i].d2 /= halfwidth * halfwidth;
        }
    };

    auto value = [base, factors, amplitude, jc, n](const double* x, double* out) {
        base.value(x, out);
        D2 b[kMaxDomainDim];
        factors(x, b);
        double prod = amplitude;
        for (int i = 0; i < n; ++i) prod *= b[i].v;
        out[jc] += prod;
    };
    auto jac = [base, factors, amplitude, jc, n](const double* x, double* out) {
        base.jacobian(x, out);
        D2 b[kMaxDomainDim];
        factors(x, b);
        for (int k = 0; k < n; ++k) {
            double prod = amplitude * b[k].d1;
            for (int i = 0; i < n; ++i)
                if (i != k) prod *= b[i].v;
            out[size_t(jc) * n + k] += prod;
        }
    };
    auto hess = [base, factors, amplitude, jc, n](const double* x, double* out) {
        base.hessian(x, out);
        D2 b[kMaxDomainDim];
        factors(x, b);
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                double prod = amplitude;
                if (k == l) {
                    prod *= b[k].d2;
                    for (int i = 0; i < n; ++i)
                        if (i != k) prod *= b[i].v;
                } else {
                    prod *= b[k].d1 * b[l].d1;
                    for (int i = 0; i < n; ++i)
                        if (i != k && i != l) prod *= b[i].v;
                }
                out[(size_t(jc) * n + k) * n + l] += prod;
                if (k != l) out[(size_t(jc) * n + l) * n + k] += prod;
            }
    };
    return Immersion::from_callables(n, f.support_halfwidth(), value, jac, hess);
}

DerivativeValidation validate_derivatives(const Immersion& f, int samples, double h,
                                          std::uint64_t seed) {
    if (!(h > 0.0)) throw ConfigError("validate_derivatives: h must be positive");
    const int n = f.dim();
    const int m = 2 * n;
    const double r = f.support_halfwidth();
    Rng rng(seed);
    DerivativeValidation rep;
    rep.samples = samples;
    rep.h = h;
    rep.jacobian_worst_point.assign(n, 0.0);
    rep.hessian_worst_point.assign(n, 0.0);

    std::vector<double> x(n), p(n), fp(m), fm(m), a(m), b(m), c(m), d(m), f0(m);
    std::vector<double> jac(size_t(m) * n), hessian(size_t(m) * n * n);
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(-r, r);
        f.jacobian(x.data(), jac.data());
        f.hessian(x.data(), hessian.data());
        f.value(x.data(), f0.data());
        for (int i = 0; i < n; ++i) {
            p = x;
            p[i] = x[i] + h;
            f.value(p.data(), fp.data());
            p[i] = x[i] - h;
            f.value(p.data(), fm.data());
            for (int j = 0; j < m; ++j) {
                const double fd = (fp[j] - fm[j]) / (2.0 * h);
                const double dev = std::fabs(fd - jac[size_t(j) * n + i]);
                if (dev > rep.max_jacobian_deviation) {
                    rep.max_jacobian_deviation = dev;
                    rep.jacobian_worst_point = x;
                }
            }
        }
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                if (k == l) {
                    p = x;
                    p[k] = x[k] + h;
                    f.value(p.data(), a.data());
                    p[k] = x[k] - h;
                    f.value(p.data(), b.data());
                    for (int j = 0; j < m; ++j) {
                        const double fd = (a[j] - 2.0 * f0[j] + b[j]) / (h * h);
                        const double dev = std::fabs(fd - hessian[(size_t(j) * n + k) * n + k]);
                        if (dev > rep.max_hessian_deviation) {
                            rep.max_hessian_deviation = dev;
                            rep.hessian_worst_point = x;
                        }
                    }
                } else {
                    p = x;
                    p[k] = x[k] + h;
                    p[l] = x[l] + h;
                    f.value(p.data(), a.data());
                    p[l] = x[l] - h;
                    f.value(p.data(), b.data());
                    p[k] = x[k] - h;
                    f.value(p.data(), c.data());
                    p[l] = x[l] + h;
                    f.value(p.data(), d.data());
                    for (int j = 0; j < m; ++j) {
                        const double fd = (a[j] - b[j] + c[j] - d[j]) / (4.0 * h * h);
                        const double dev = std::fabs(fd - hessian[(size_t(j) * n + k) * n + l]);
                        if (dev > rep.max_hessian_deviation) {
                            rep.max_hessian_deviation = dev;
                            rep.hessian_worst_point = x;
                        }
                    }
                }
            }
    }
    return rep;
}

}  // namespace immindex

#include "immindex/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "immindex/parallel.hpp"
#include "immindex/stiefel_form.hpp"

namespace immindex {

Box Box::cube(int dim, double halfwidth) {
    if (dim < 1 || dim > kMaxQuadDim) throw ConfigError("Box: dimension out of range [1, 8]");
    Box b;
    b.dim = dim;
    for (int i = 0; i < dim; ++i) {
        b.lo[i] = -halfwidth;
        b.hi[i] = halfwidth;
    }
    return b;
}

double Box::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= hi[i] - lo[i];
    return v;
}

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol >= 0.0)) throw ConfigError("QuadratureConfig: tolerances must be positive");
    if (rule_order < 3 || rule_order > 15) throw ConfigError("QuadratureConfig: rule_order must be in {3..15}");
    if (max_subdivisions < 0) throw ConfigError("QuadratureConfig: max_subdivisions must be >= 0");
    if (initial_splits_per_axis < 1 || initial_splits_per_axis > 32)
        throw ConfigError("QuadratureConfig: initial_splits_per_axis must be in [1, 32]");
}

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

/// Newton iteration on the Legendre polynomial; standard and accurate to
/// machine precision for the orders used here.
GaussRule compute_gauss(int order) {
    GaussRule r;
    r.nodes.resize(order);
    r.weights.resize(order);
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n == 1) {
        r.nodes[0] = 0.0;
        r.weights[0] = 2.0;
    }
    return r;
}

const GaussRule& gauss_rule(int order) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss(order)).first;
    return it->second;
}

/// Tensor product rule over a cell for a plain point function.
double tensor_rule(const std::function<double(const double*)>& g, const Box& cell, int order,
                   std::int64_t& evals) {
    const GaussRule& rule = gauss_rule(order);
    const int d = cell.dim;
    double mid[kMaxQuadDim], half[kMaxQuadDim];
    for (int i = 0; i < d; ++i) {
        mid[i] = 0.5 * (cell.lo[i] + cell.hi[i]);
        half[i] = 0.5 * (cell.hi[i] - cell.lo[i]);
    }
    long total = 1;
    for (int i = 0; i < d; ++i) total *= order;
    double sum = 0.0;
    int idx[kMaxQuadDim] = {0};
    double x[kMaxQuadDim];
    for (long c = 0; c < total; ++c) {
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            x[i] = mid[i] + half[i] * rule.nodes[idx[i]];
            w *= rule.weights[idx[i]] * half[i];
        }
        sum += w * g(x);
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < order) break;
            idx[i] = 0;
        }
    }
    evals += total;
    return sum;
}

class PointFnRule final : public CellRule {
public:
    PointFnRule(std::function<double(const double*)> g, int order)
        : g_(std::move(g)), order_high_(order), order_low_(std::max(order - 2, 1)) {}

    CellEstimate evaluate(const Box& cell) const override {
        CellEstimate est;
        est.value_high = tensor_rule(g_, cell, order_high_, est.evaluations);
        est.value_low = tensor_rule(g_, cell, order_low_, est.evaluations);
        return est;
    }

private:
    std::function<double(const double*)> g_;
    int order_high_;
    int order_low_;
};

struct Cell {
    Box box;
    double value = 0.0;
    double error = 0.0;
    std::uint64_t id = 0;
    bool alive = true;
};

int widest_axis(const Box& b) {
    int axis = 0;
    double w = b.hi[0] - b.lo[0];
    for (int i = 1; i < b.dim; ++i)
        if (b.hi[i] - b.lo[i] > w) {
            w = b.hi[i] - b.lo[i];
            axis = i;
        }
    return axis;
}

}  // namespace

QuadratureResult integrate_adaptive_rule(const CellRule& rule, const Box& box,
                                         const QuadratureConfig& cfg) {
    cfg.validate();
    QuadratureResult res;

    std::vector<Cell> cells;
    cells.reserve(1024);
    // priority queue of (error, id); larger error first, smaller id breaks ties
    using Entry = std::pair<double, std::uint64_t>;
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

    {
        const int m = cfg.initial_splits_per_axis;
        long initial = 1;
        for (int i = 0; i < box.dim; ++i) initial *= m;
        cells.resize(size_t(initial));
        std::vector<std::int64_t> evals(size_t(initial), 0);
        parallel_for(size_t(initial), [&](std::size_t c) {
            Box sub = box;
            long rem = long(c);
            for (int i = 0; i < box.dim; ++i) {
                const int gi = int(rem % m);
                rem /= m;
                const double w = (box.hi[i] - box.lo[i]) / m;
                sub.lo[i] = box.lo[i] + gi * w;
                sub.hi[i] = (gi == m - 1) ? box.hi[i] : box.lo[i] + (gi + 1) * w;
            }
            const CellEstimate est = rule.evaluate(sub);
            cells[c].box = sub;
            cells[c].id = c;
            cells[c].value = est.value_high;
            cells[c].error = std::fabs(est.value_high - est.value_low);
            evals[c] = est.evaluations;
        });
        for (long c = 0; c < initial; ++c) {
            res.evaluations += evals[c];
            queue.emplace(cells[c].error, cells[c].id);
        }
    }

    double total_value = 0.0;
    double total_error = 0.0;
    for (const Cell& c : cells) {
        total_value += c.value;
        total_error += c.error;
    }
    int splits = 0;
    const int batch = 32;

    auto tolerance_met = [&] {
        return total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total_value));
    };

    while (!tolerance_met() && !queue.empty()) {
        if (splits >= cfg.max_subdivisions) {
            res.budget_exhausted = true;
            break;
        }
        std::vector<std::uint64_t> chosen;
        while (!queue.empty() && int(chosen.size()) < batch && splits + int(chosen.size()) < cfg.max_subdivisions) {
            const auto [err, id] = queue.top();
            queue.pop();
            if (!cells[id].alive || cells[id].error != err) continue;  // stale entry
            if (err == 0.0) continue;  // nothing left worth splitting
            chosen.push_back(id);
        }
        if (chosen.empty()) break;
        splits += int(chosen.size());

        struct ChildPair {
            Cell a, b;
            std::int64_t evals = 0;
        };
        std::vector<ChildPair> children(chosen.size());
        parallel_for(chosen.size(), [&](std::size_t k) {
            const Cell& parent = cells[chosen[k]];
            const int axis = widest_axis(parent.box);
            const double mid = 0.5 * (parent.box.lo[axis] + parent.box.hi[axis]);
            Box ba = parent.box, bb = parent.box;
            ba.hi[axis] = mid;
            bb.lo[axis] = mid;
            const CellEstimate ea = rule.evaluate(ba);
            const CellEstimate eb = rule.evaluate(bb);
            children[k].a.box = ba;
            children[k].a.value = ea.value_high;
            children[k].a.error = std::fabs(ea.value_high - ea.value_low);
            children[k].b.box = bb;
            children[k].b.value = eb.value_high;
            children[k].b.error = std::fabs(eb.value_high - eb.value_low);
            children[k].evals = ea.evaluations + eb.evaluations;
        });

        for (std::size_t k = 0; k < chosen.size(); ++k) {
            Cell& parent = cells[chosen[k]];
            parent.alive = false;
            total_value -= parent.value;
            total_error -= parent.error;
            res.evaluations += children[k].evals;
            for (Cell* child : {&children[k].a, &children[k].b}) {
                child->id = cells.size();
                child->alive = true;
                total_value += child->value;
                total_error += child->error;
                cells.push_back(*child);
                queue.emplace(child->error, child->id);
            }
        }
    }

    // stable final reduction, independent of refinement incidentals
    double sum = 0.0, comp = 0.0, err = 0.0;
    for (const Cell& c : cells) {
        if (!c.alive) continue;
        const double y = c.value - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        err += c.error;
    }
    res.value = sum;
    res.error_estimate = err;
    return res;
}

QuadratureResult integrate_adaptive(const std::function<double(const double*)>& g, const Box& box,
                                    const QuadratureConfig& cfg) {
    PointFnRule rule(g, cfg.rule_order);
    return integrate_adaptive_rule(rule, box, cfg);
}

const std::vector<double>& gauss_nodes(int order) { return gauss_rule(order).nodes; }
const std::vector<double>& gauss_weights(int order) { return gauss_rule(order).weights; }

IndexReport make_rounded_report(std::string method, double raw, double error_estimate,
                                std::int64_t evaluations, bool budget_exhausted) {
    IndexReport rep;
    rep.method = std::move(method);
    rep.raw_value = raw;
    rep.error_estimate = error_estimate;
    rep.evaluations = evaluations;
    rep.budget_exhausted = budget_exhausted;
    rep.index = std::lround(raw);
    rep.residual = std::fabs(raw - double(rep.index));
    // an index is exact; refuse to round a noisy value
    rep.index_valid = rep.residual < 0.1;
    if (!rep.index_valid) rep.index = 0;
    return rep;
}

namespace {

constexpr double kSupportPadding = 0.05;

}  // namespace

IndexReport index_by_integral(const Immersion& f, const QuadratureConfig& cfg) {
    if (f.dim() % 2 != 0) throw OddDimensionError("index_by_integral: n must be even");
    const Box box = Box::cube(f.dim(), f.support_halfwidth() + kSupportPadding);
    const Immersion g = f;
    const QuadratureResult q = integrate_adaptive(
        [g](const double* x) { return integrand_pullback(g, x); }, box, cfg);
    return make_rounded_report("integral", q.value, q.error_estimate, q.evaluations,
                               q.budget_exhausted);
}

QuadratureResult integral_index_direct_route(const Immersion& f, const QuadratureConfig& cfg) {
    if (f.dim() % 2 != 0) throw OddDimensionError("integral_index_direct_route: n must be even");
    const Box box = Box::cube(f.dim(), f.support_halfwidth() + kSupportPadding);
    const Immersion g = f;
    return integrate_adaptive([g](const double* x) { return integrand_direct(g, x); }, box, cfg);
}

IndexReport index_whitney_1d(const Immersion& f, const QuadratureConfig& cfg) {
    if (f.dim() != 1) throw DimensionMismatchError("index_whitney_1d: n must be 1");
    const Box box = Box::cube(1, f.support_halfwidth() + kSupportPadding);
    const Immersion g = f;
    const QuadratureResult q = integrate_adaptive(
        [g](const double* x) { return whitney_integrand_1d(g, x[0]); }, box, cfg);
    const double raw = q.value / (2.0 * std::numbers::pi);
    return make_rounded_report("whitney-1d", raw, q.error_estimate / (2.0 * std::numbers::pi),
                               q.evaluations, q.budget_exhausted);
}

}  // namespace immindex

#include "cli.hpp"

#include <algorithm>
#include <cmath>

#include "immindex/json_writer.hpp"
#include "immindex/laplace.hpp"
#include "immindex/stiefel_form.hpp"

namespace immindex::cli {

using nlohmann::json;

namespace {

double require_number(const json& j, const char* key, double fallback = std::nan(""),
                      bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(std::string("immersion spec: missing field '") + key + "'");
        return fallback;
    }
    if (!j.at(key).is_number()) throw ConfigError(std::string("immersion spec: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

json default_bump_spec() { return json{{"center", 0.2}, {"halfwidth", 0.8}, {"amplitude", 1.0}}; }

BumpFunction bump_from(const json& j) {
    return BumpFunction(require_number(j, "center", 0.2), require_number(j, "halfwidth", 0.8),
                        require_number(j, "amplitude", 1.0));
}

}  // namespace

Immersion build_immersion(const json& spec) {
    if (!spec.is_object() || !spec.contains("builder") || !spec.at("builder").is_string())
        throw ConfigError("immersion spec: expected an object with a 'builder' string");
    const std::string builder = spec.at("builder").get<std::string>();
    try {
        if (builder == "trivial") {
            const int n = int(require_number(spec, "n", 0.0, true));
            return trivial_immersion(n);
        }
        if (builder == "one_loop_curve") return one_loop_curve();
        if (builder == "lift") {
            if (!spec.contains("base")) throw ConfigError("lift spec: missing 'base'");
            const json bump = spec.contains("bump") ? spec.at("bump") : default_bump_spec();
            return lift(build_immersion(spec.at("base")), bump_from(bump));
        }
        if (builder == "concat") {
            if (!spec.contains("first") || !spec.contains("second"))
                throw ConfigError("concat spec: needs 'first' and 'second'");
            return concat(build_immersion(spec.at("first")), build_immersion(spec.at("second")));
        }
        if (builder == "mirror") {
            if (!spec.contains("base")) throw ConfigError("mirror spec: missing 'base'");
            return mirror_last_coordinate(build_immersion(spec.at("base")));
        }
        if (builder == "perturb") {
            if (!spec.contains("base")) throw ConfigError("perturb spec: missing 'base'");
            Immersion base = build_immersion(spec.at("base"));
            const int coord = int(require_number(spec, "coordinate", double(2 * base.dim())));
            const double amplitude = require_number(spec, "amplitude", 0.01);
            const double halfwidth = require_number(spec, "halfwidth", 0.2);
            std::vector<double> center(base.dim(), 0.25);
            if (spec.contains("center")) {
                if (!spec.at("center").is_array())
                    throw ConfigError("perturb spec: 'center' must be an array");
                center = spec.at("center").get<std::vector<double>>();
            }
            return perturb(base, coord, amplitude, center, halfwidth);
        }
    } catch (const TooLargeError& e) {
        throw ConfigError(e.what());
    } catch (const DimensionMismatchError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("immersion spec: unknown builder '" + builder + "'");
}

json canonical_spec(const json& spec) {
    // validates as a side effect of reading the same fields build_immersion does
    if (!spec.is_object() || !spec.contains("builder") || !spec.at("builder").is_string())
        throw ConfigError("immersion spec: expected an object with a 'builder' string");
    const std::string builder = spec.at("builder").get<std::string>();
    json out;
    out["builder"] = builder;
    if (builder == "trivial") {
        out["n"] = int(require_number(spec, "n", 0.0, true));
    } else if (builder == "one_loop_curve") {
        // no parameters
    } else if (builder == "lift") {
        out["base"] = canonical_spec(spec.at("base"));
        const json bump = spec.contains("bump") ? spec.at("bump") : default_bump_spec();
        out["bump"] = json{{"center", require_number(bump, "center", 0.2)},
                           {"halfwidth", require_number(bump, "halfwidth", 0.8)},
                           {"amplitude", require_number(bump, "amplitude", 1.0)}};
    } else if (builder == "concat") {
        out["first"] = canonical_spec(spec.at("first"));
        out["second"] = canonical_spec(spec.at("second"));
    } else if (builder == "mirror") {
        out["base"] = canonical_spec(spec.at("base"));
    } else if (builder == "perturb") {
        out["base"] = canonical_spec(spec.at("base"));
        const int base_dim = build_immersion(spec.at("base")).dim();
        out["coordinate"] =
            spec.contains("coordinate") ? int(require_number(spec, "coordinate")) : 2 * base_dim;
        out["amplitude"] = require_number(spec, "amplitude", 0.01);
        out["center"] = spec.contains("center") ? spec.at("center")
                                                : json(std::vector<double>(size_t(base_dim), 0.25));
        out["halfwidth"] = require_number(spec, "halfwidth", 0.2);
    } else {
        throw ConfigError("immersion spec: unknown builder '" + builder + "'");
    }
    return out;
}

std::vector<std::string> example_names() {
    return {"trivial2", "loop1", "lifted2", "double2", "perturbed2", "trivial3"};
}

json example_spec(const std::string& name) {
    const json lifted = {{"builder", "lift"},
                         {"base", {{"builder", "one_loop_curve"}}},
                         {"bump", default_bump_spec()}};
    if (name == "trivial2") return {{"builder", "trivial"}, {"n", 2}};
    if (name == "loop1") return {{"builder", "one_loop_curve"}};
    if (name == "lifted2") return lifted;
    if (name == "double2") return {{"builder", "concat"}, {"first", lifted}, {"second", lifted}};
    if (name == "perturbed2")
        return {{"builder", "perturb"}, {"base", lifted},         {"coordinate", 4},
                {"amplitude", 0.01},    {"center", {0.4, 0.1}},   {"halfwidth", 0.3}};
    if (name == "trivial3") return {{"builder", "trivial"}, {"n", 3}};
    throw ConfigError("examples: unknown name '" + name + "' (see 'examples list')");
}

namespace {

JsonValue report_json(const IndexReport& rep) {
    JsonValue v = JsonValue::object();
    v.set("method", JsonValue::string(rep.method));
    v.set("raw_value", JsonValue::number(rep.raw_value));
    if (rep.index_valid)
        v.set("index", JsonValue::integer(rep.index));
    else
        v.set("index", JsonValue::null());
    v.set("index_valid", JsonValue::boolean(rep.index_valid));
    v.set("residual", JsonValue::number(rep.residual));
    v.set("error_estimate", JsonValue::number(rep.error_estimate));
    v.set("evaluations", JsonValue::integer(rep.evaluations));
    v.set("budget_exhausted", JsonValue::boolean(rep.budget_exhausted));
    return v;
}

/// nlohmann tree -> deterministic writer tree (objects keep insertion order).
JsonValue to_writer(const json& j) {
    switch (j.type()) {
        case json::value_t::object: {
            JsonValue v = JsonValue::object();
            for (auto it = j.begin(); it != j.end(); ++it) v.set(it.key(), to_writer(it.value()));
            return v;
        }
        case json::value_t::array: {
            JsonValue v = JsonValue::array();
            for (const auto& item : j) v.push(to_writer(item));
            return v;
        }
        case json::value_t::string: return JsonValue::string(j.get<std::string>());
        case json::value_t::boolean: return JsonValue::boolean(j.get<bool>());
        case json::value_t::number_integer: return JsonValue::integer(j.get<std::int64_t>());
        case json::value_t::number_unsigned: return JsonValue::integer(std::int64_t(j.get<std::uint64_t>()));
        case json::value_t::number_float: return JsonValue::number(j.get<double>());
        default: return JsonValue::null();
    }
}

CommandResult finish(JsonValue& doc, int exit_code) {
    CommandResult res;
    res.output = doc.dump(2) + "\n";
    res.exit_code = exit_code;
    return res;
}

}  // namespace

CommandResult run_index(const json& spec, const IndexOptions& opt) {
    const json canonical = canonical_spec(spec);
    const Immersion f = build_immersion(spec);
    const int n = f.dim();

    QuadratureConfig qcfg;
    if (opt.tol != 0.0) {
        if (!(opt.tol > 0.0)) throw ConfigError("index: --tol must be positive");
        qcfg.abs_tol = opt.tol;
        qcfg.rel_tol = opt.tol;
    }
    SolverConfig scfg;
    if (opt.grid != 0) {
        if (opt.grid < 2) throw ConfigError("index: --grid must be at least 2");
        scfg.grid_points_per_axis = opt.grid;
    }

    JsonValue doc = JsonValue::object();
    doc.set("schema", JsonValue::integer(1));
    doc.set("command", JsonValue::string("index"));
    doc.set("n", JsonValue::integer(n));
    doc.set("immersion", to_writer(canonical));
    JsonValue reports = JsonValue::object();

    bool all_valid = true;
    bool agree = true;
    long agreed_index = 0;

    const IndexReport signs = index_by_signs(f, scfg);
    reports.set(signs.method == "parity" ? "parity" : "sign_sum", report_json(signs));
    agreed_index = signs.index;

    if (n % 2 == 0) {
        const IndexReport integral = index_by_integral(f, qcfg);
        reports.set("integral", report_json(integral));
        all_valid = all_valid && integral.index_valid;
        agree = agree && integral.index_valid && integral.index == signs.index;
    } else if (n == 1) {
        const IndexReport whitney = index_whitney_1d(f, qcfg);
        reports.set("whitney_1d", report_json(whitney));
        all_valid = all_valid && whitney.index_valid;
        agree = agree && whitney.index_valid && whitney.index == signs.index;
    }

    doc.set("reports", reports);
    doc.set("agree", JsonValue::boolean(agree));
    if (agree)
        doc.set("index", JsonValue::integer(agreed_index));
    else
        doc.set("index", JsonValue::null());
    return finish(doc, all_valid ? 0 : 2);
}

CommandResult run_intersections(const json& spec, const IntersectionsOptions& opt) {
    const json canonical = canonical_spec(spec);
    const Immersion f = build_immersion(spec);
    SolverConfig scfg;
    if (opt.grid != 0) {
        if (opt.grid < 2) throw ConfigError("intersections: --grid must be at least 2");
        scfg.grid_points_per_axis = opt.grid;
    }
    FinderDiagnostics diag;
    const std::vector<IntersectionRecord> records = find_self_intersections(f, scfg, &diag);

    JsonValue doc = JsonValue::object();
    doc.set("schema", JsonValue::integer(1));
    doc.set("command", JsonValue::string("intersections"));
    doc.set("n", JsonValue::integer(f.dim()));
    doc.set("immersion", to_writer(canonical));
    doc.set("count", JsonValue::integer(std::int64_t(records.size())));
    JsonValue arr = JsonValue::array();
    for (const IntersectionRecord& rec : records) {
        JsonValue r = JsonValue::object();
        r.set("ambient_point", JsonValue::number_array(rec.ambient_point));
        r.set("preimage_1", JsonValue::number_array(rec.preimage_1));
        r.set("preimage_2", JsonValue::number_array(rec.preimage_2));
        r.set("sign", JsonValue::integer(rec.sign));
        r.set("transversality_det", JsonValue::number(rec.transversality_det));
        r.set("residual", JsonValue::number(rec.residual));
        arr.push(r);
    }
    doc.set("records", arr);
    JsonValue d = JsonValue::object();
    d.set("seeds", JsonValue::integer(diag.seeds));
    d.set("converged", JsonValue::integer(diag.converged));
    d.set("completeness_warning", JsonValue::boolean(diag.completeness_warning));
    doc.set("diagnostics", d);
    return finish(doc, 0);
}

CommandResult run_check_form(const CheckFormOptions& opt) {
    if (opt.n % 2 != 0) throw ConfigError("check-form: n must be even");
    if (opt.samples < 0) throw ConfigError("check-form: samples must be >= 0");
    ClosednessCheck check;
    if (opt.perturbed) {
        const StiefelForm form = perturbed_omega_form(1.0);
        check = run_closedness_check(opt.n, opt.samples, opt.seed, opt.h, opt.threshold, 1e-3, &form);
    } else {
        check = run_closedness_check(opt.n, opt.samples, opt.seed, opt.h, opt.threshold);
    }
    JsonValue doc = JsonValue::object();
    doc.set("schema", JsonValue::integer(1));
    doc.set("command", JsonValue::string("check-form"));
    doc.set("n", JsonValue::integer(opt.n));
    doc.set("samples", JsonValue::integer(opt.samples));
    doc.set("seed", JsonValue::integer(std::int64_t(opt.seed)));
    doc.set("h", JsonValue::number(opt.h));
    doc.set("perturbed", JsonValue::boolean(opt.perturbed));
    doc.set("max_abs_d_omega", JsonValue::number(check.max_normalized));
    doc.set("threshold", JsonValue::number(check.threshold));
    doc.set("pass", JsonValue::boolean(check.pass));
    if (opt.samples == 0) doc.set("warning", JsonValue::string("no samples drawn; pass is vacuous"));
    return finish(doc, check.pass ? 0 : 2);
}

CommandResult run_check_laplace(const json& spec, const CheckLaplaceOptions& opt) {
    const json canonical = canonical_spec(spec);
    const Immersion f = build_immersion(spec);
    if (opt.lambdas.empty()) throw ConfigError("check-laplace: at least one lambda required");
    for (double l : opt.lambdas)
        if (!(l > 0.0)) throw ConfigError("check-laplace: lambdas must be positive");

    QuadratureConfig jcfg;
    jcfg.abs_tol = opt.tol;
    jcfg.rel_tol = 0.0;
    jcfg.rule_order = 5;
    jcfg.max_subdivisions = 2000000;
    QuadratureConfig icfg;  // index-route defaults
    SolverConfig scfg;
    if (opt.grid > 0) scfg.grid_points_per_axis = opt.grid;

    const std::vector<LaplaceReport> reports = laplace_sweep(f, opt.lambdas, jcfg, icfg, scfg);

    JsonValue doc = JsonValue::object();
    doc.set("schema", JsonValue::integer(1));
    doc.set("command", JsonValue::string("check-laplace"));
    doc.set("n", JsonValue::integer(f.dim()));
    doc.set("immersion", to_writer(canonical));
    doc.set("tol", JsonValue::number(opt.tol));
    JsonValue lam = JsonValue::array();
    for (double l : opt.lambdas) lam.push(JsonValue::number(l));
    doc.set("lambdas", lam);
    JsonValue arr = JsonValue::array();
    bool any_budget = false;
    for (const LaplaceReport& rep : reports) {
        JsonValue r = JsonValue::object();
        r.set("lambda", JsonValue::number(rep.lambda));
        r.set("J_value", JsonValue::number(rep.J_value));
        r.set("J_error_estimate", JsonValue::number(rep.J_error_estimate));
        r.set("diag_value", JsonValue::number(rep.diag_value));
        r.set("selfint_value", JsonValue::number(rep.selfint_value));
        r.set("defect", JsonValue::number(rep.defect));
        r.set("normalized_defect", JsonValue::number(rep.normalized_defect));
        r.set("remainder", JsonValue::number(rep.remainder));
        r.set("normalized_remainder", JsonValue::number(rep.normalized_remainder));
        r.set("evaluations", JsonValue::integer(rep.evaluations));
        r.set("budget_exhausted", JsonValue::boolean(rep.budget_exhausted));
        arr.push(r);
        any_budget = any_budget || rep.budget_exhausted;
    }
    doc.set("reports", arr);
    if (any_budget)
        doc.set("warning", JsonValue::string("subdivision budget exhausted before tolerance"));
    return finish(doc, 0);
}

CommandResult run_validate(const json& spec, const ValidateOptions& opt) {
    const json canonical = canonical_spec(spec);
    const Immersion f = build_immersion(spec);
    if (opt.samples < 1) throw ConfigError("validate: samples must be >= 1");
    const DerivativeValidation v = validate_derivatives(f, opt.samples, opt.h, opt.seed);
    const bool pass =
        v.max_jacobian_deviation < opt.threshold && v.max_hessian_deviation < opt.threshold;
    JsonValue doc = JsonValue::object();
    doc.set("schema", JsonValue::integer(1));
    doc.set("command", JsonValue::string("validate"));
    doc.set("n", JsonValue::integer(f.dim()));
    doc.set("immersion", to_writer(canonical));
    doc.set("samples", JsonValue::integer(opt.samples));
    doc.set("h", JsonValue::number(opt.h));
    doc.set("seed", JsonValue::integer(std::int64_t(opt.seed)));
    doc.set("threshold", JsonValue::number(opt.threshold));
    doc.set("max_jacobian_deviation", JsonValue::number(v.max_jacobian_deviation));
    doc.set("jacobian_worst_point", JsonValue::number_array(v.jacobian_worst_point));
    doc.set("max_hessian_deviation", JsonValue::number(v.max_hessian_deviation));
    doc.set("hessian_worst_point", JsonValue::number_array(v.hessian_worst_point));
    doc.set("pass", JsonValue::boolean(pass));
    return finish(doc, pass ? 0 : 2);
}

CommandResult run_examples_list() {
    JsonValue doc = JsonValue::object();
    doc.set("schema", JsonValue::integer(1));
    doc.set("command", JsonValue::string("examples"));
    JsonValue names = JsonValue::array();
    for (const std::string& name : example_names()) names.push(JsonValue::string(name));
    doc.set("names", names);
    return finish(doc, 0);
}

CommandResult run_examples_emit(const std::string& name) {
    JsonValue doc = to_writer(canonical_spec(example_spec(name)));
    return finish(doc, 0);
}

}  // namespace immindex::cli

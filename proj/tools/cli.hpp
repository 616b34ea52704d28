#ifndef IMMINDEX_CLI_HPP
#define IMMINDEX_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "immindex/immersion.hpp"
#include "immindex/intersections.hpp"
#include "immindex/quadrature.hpp"

namespace immindex::cli {

/// Builds an immersion from a declarative descriptor:
///   {"builder": "trivial", "n": 2}
///   {"builder": "one_loop_curve"}
///   {"builder": "lift", "base": {...}, "bump": {"center": .., "halfwidth": .., "amplitude": ..}}
///   {"builder": "concat", "first": {...}, "second": {...}}
///   {"builder": "mirror", "base": {...}}
///   {"builder": "perturb", "base": {...}, "coordinate": j, "amplitude": a,
///    "center": [..], "halfwidth": h}
/// Unknown builders or malformed fields raise ConfigError.
Immersion build_immersion(const nlohmann::json& spec);

/// The descriptor with defaults materialized and keys in canonical order;
/// echoed into reports so a run is reproducible from its output alone.
nlohmann::json canonical_spec(const nlohmann::json& spec);

/// Named descriptors of the example suite.
std::vector<std::string> example_names();
nlohmann::json example_spec(const std::string& name);

struct CommandResult {
    std::string output;  // JSON document, newline-terminated
    int exit_code = 0;   // 0 ok, 1 config/usage, 2 mathematical check failed
};

struct IndexOptions {
    double tol = 0.0;  // 0 = defaults (abs 1e-4 / rel 1e-4)
    int grid = 0;      // 0 = solver default
};

struct IntersectionsOptions {
    int grid = 0;
};

struct CheckFormOptions {
    int n = 2;
    int samples = 100;
    std::uint64_t seed = 1;
    double h = 1e-4;
    double threshold = 1e-4;
    bool perturbed = false;  // debug: inject a non-closed term, expect failure
};

struct CheckLaplaceOptions {
    std::vector<double> lambdas = {25.0, 50.0, 100.0};
    double tol = 1e-3;
    int grid = 0;
};

struct ValidateOptions {
    int samples = 200;
    double h = 1e-5;
    double threshold = 1e-5;
    std::uint64_t seed = 12345;
};

CommandResult run_index(const nlohmann::json& spec, const IndexOptions& opt);
CommandResult run_intersections(const nlohmann::json& spec, const IntersectionsOptions& opt);
CommandResult run_check_form(const CheckFormOptions& opt);
CommandResult run_check_laplace(const nlohmann::json& spec, const CheckLaplaceOptions& opt);
CommandResult run_validate(const nlohmann::json& spec, const ValidateOptions& opt);
CommandResult run_examples_list();
CommandResult run_examples_emit(const std::string& name);

}  // namespace immindex::cli

#endif

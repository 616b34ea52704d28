#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli.hpp"
#include "immindex/errors.hpp"

namespace {

nlohmann::json load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw immindex::ConfigError("cannot open spec file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw immindex::ConfigError("spec file is not valid JSON: " + std::string(e.what()));
    }
    return j;
}

int deliver(const immindex::cli::CommandResult& res, const std::string& out_path) {
    std::fputs(res.output.c_str(), stdout);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "error: cannot write output file: %s\n", out_path.c_str());
            return 1;
        }
        out << res.output;
    }
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"immindex: index of immersions R^n -> R^2n by intersection counting and by "
                 "integration of a Stiefel-variety form, with consistency checks"};
    app.require_subcommand(1);
    // --h is a real option below, so help must not claim the -h shorthand
    app.set_help_flag("--help", "print help");

    std::string spec_path, out_path;

    auto* cmd_index = app.add_subcommand("index", "compute the index by all applicable methods");
    immindex::cli::IndexOptions index_opt;
    cmd_index->add_option("--spec", spec_path, "immersion descriptor (JSON file)")->required();
    cmd_index->add_option("--tol", index_opt.tol, "quadrature abs/rel tolerance override");
    cmd_index->add_option("--grid", index_opt.grid, "finder grid points per axis");
    cmd_index->add_option("--out", out_path, "also write the report to this file");

    auto* cmd_inter = app.add_subcommand("intersections", "list self-intersection records");
    immindex::cli::IntersectionsOptions inter_opt;
    cmd_inter->add_option("--spec", spec_path, "immersion descriptor (JSON file)")->required();
    cmd_inter->add_option("--grid", inter_opt.grid, "finder grid points per axis");
    cmd_inter->add_option("--out", out_path, "also write the report to this file");

    auto* cmd_form = app.add_subcommand("check-form", "finite-difference closedness sweep of the form");
    immindex::cli::CheckFormOptions form_opt;
    cmd_form->add_option("--n", form_opt.n, "domain dimension (even)")->default_val(2);
    cmd_form->add_option("--samples", form_opt.samples, "number of random samples")->default_val(100);
    cmd_form->add_option("--seed", form_opt.seed, "PRNG seed")->default_val(1);
    cmd_form->add_option("--h", form_opt.h, "relative FD step")->default_val(1e-4);
    cmd_form->add_option("--threshold", form_opt.threshold, "normalized residual bound")
        ->default_val(1e-4);
    cmd_form->add_flag("--perturbed", form_opt.perturbed,
                       "inject a non-closed term (detector self-test; expected to fail)");
    cmd_form->add_option("--out", out_path, "also write the report to this file");

    auto* cmd_laplace = app.add_subcommand("check-laplace", "Laplace integral vanishing and its "
                                                            "leading-order decomposition");
    immindex::cli::CheckLaplaceOptions laplace_opt;
    std::string lambdas_csv = "25,50,100";
    cmd_laplace->add_option("--spec", spec_path, "immersion descriptor (JSON file)")->required();
    cmd_laplace->add_option("--lambdas", lambdas_csv, "comma-separated lambda sweep");
    cmd_laplace->add_option("--tol", laplace_opt.tol, "absolute tolerance for J")->default_val(1e-3);
    cmd_laplace->add_option("--out", out_path, "also write the report to this file");

    auto* cmd_validate = app.add_subcommand("validate", "finite-difference derivative validation");
    immindex::cli::ValidateOptions validate_opt;
    cmd_validate->add_option("--spec", spec_path, "immersion descriptor (JSON file)")->required();
    cmd_validate->add_option("--h", validate_opt.h, "FD step")->default_val(1e-5);
    cmd_validate->add_option("--samples", validate_opt.samples, "sample points")->default_val(200);
    cmd_validate->add_option("--seed", validate_opt.seed, "PRNG seed")->default_val(12345);
    cmd_validate->add_option("--threshold", validate_opt.threshold, "max allowed deviation")
        ->default_val(1e-5);
    cmd_validate->add_option("--out", out_path, "also write the report to this file");

    auto* cmd_examples = app.add_subcommand("examples", "list or emit example immersion descriptors");
    std::string examples_action, examples_name;
    cmd_examples->add_option("action", examples_action, "'list' or 'emit'")->required();
    cmd_examples->add_option("name", examples_name, "example name (for 'emit')");
    cmd_examples->add_option("--out", out_path, "also write the descriptor to this file");

    for (CLI::App* sub : {cmd_index, cmd_inter, cmd_form, cmd_laplace, cmd_validate, cmd_examples})
        sub->set_help_flag("--help", "print help");

    // exit-code contract: 0 = pass, 2 = mathematical check failed, 1 = usage/config
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        using namespace immindex::cli;
        if (app.got_subcommand(cmd_index)) return deliver(run_index(load_spec(spec_path), index_opt), out_path);
        if (app.got_subcommand(cmd_inter))
            return deliver(run_intersections(load_spec(spec_path), inter_opt), out_path);
        if (app.got_subcommand(cmd_form)) return deliver(run_check_form(form_opt), out_path);
        if (app.got_subcommand(cmd_laplace)) {
            laplace_opt.lambdas.clear();
            std::stringstream ss(lambdas_csv);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) laplace_opt.lambdas.push_back(std::stod(tok));
            return deliver(run_check_laplace(load_spec(spec_path), laplace_opt), out_path);
        }
        if (app.got_subcommand(cmd_validate))
            return deliver(run_validate(load_spec(spec_path), validate_opt), out_path);
        if (app.got_subcommand(cmd_examples)) {
            if (examples_action == "list") return deliver(run_examples_list(), out_path);
            if (examples_action == "emit") {
                if (examples_name.empty())
                    throw immindex::ConfigError("examples emit: a name is required");
                return deliver(run_examples_emit(examples_name), out_path);
            }
            throw immindex::ConfigError("examples: action must be 'list' or 'emit'");
        }
    } catch (const immindex::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const immindex::NonTransversalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const immindex::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        // residual parse/type errors (bad flag values, malformed spec fields)
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

// Command-line front end: validate, run, report, sweep.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "snslab/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Validates and prints diagnostics. Returns the config or nullopt.
std::optional<snslab::ScenarioConfig> load(const std::string& path, bool echo) {
    std::string text;
    try {
        text = slurp(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return std::nullopt;
    }
    auto result = snslab::validate_config(text);
    for (const auto& e : result.errors) std::cerr << "error: " << e << "\n";
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    if (result.ok() && echo) std::cout << result.config->resolved().dump(2) << "\n";
    return std::move(result.config);
}

int report_run(const snslab::RunResult& r) {
    for (const auto& m : r.messages) std::cerr << m << "\n";
    std::cout << fmt::format("wrote {} artifacts to {}\n", r.artifacts.size() + 1, r.directory.string());
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-Galerkin laboratory for stochastic Navier-Stokes with Markov switching"};
    app.require_subcommand(1);

    std::string config_path, out_dir, report_dir;
    std::optional<int> workers;
    std::vector<double> epsilons;

    auto* validate = app.add_subcommand("validate", "Check a scenario file and echo resolved values");
    validate->add_option("config", config_path, "Scenario file")->required();

    auto* run = app.add_subcommand("run", "Run every experiment of a scenario");
    run->add_option("config", config_path, "Scenario file")->required();
    run->add_option("-o,--output", out_dir, "Output directory (overrides the scenario)");
    run->add_option("-w,--workers", workers, "Worker threads (default: $SNSLAB_WORKERS, then the scenario)");

    auto* report = app.add_subcommand("report", "Emit plot-ready CSV tables from a run directory");
    report->add_option("dir", report_dir, "Run directory")->required();

    auto* sweep = app.add_subcommand("sweep", "Run only the epsilon sweep");
    sweep->add_option("config", config_path, "Scenario file")->required();
    sweep->add_option("--epsilons", epsilons, "Strictly decreasing list ending at 0")->required();
    sweep->add_option("-o,--output", out_dir, "Output directory (overrides the scenario)");
    sweep->add_option("-w,--workers", workers, "Worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return load(config_path, true) ? snslab::exit_success : snslab::exit_validation;

        if (*report) {
            for (const auto& p : snslab::emit_plotdata(report_dir)) std::cout << p.string() << "\n";
            return snslab::exit_success;
        }

        auto cfg = load(config_path, false);
        if (!cfg) return snslab::exit_validation;
        snslab::RunOptions options;
        if (!out_dir.empty()) options.output_dir = out_dir;
        options.workers = workers ? workers : snslab::workers_from_environment();
        if (*sweep) {
            options.only = {"epsilon_sweep"};
            options.epsilons = epsilons;
        }
        try {
            return report_run(snslab::run_scenario(*cfg, options));
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return snslab::exit_validation;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return snslab::exit_failure;
    }
}

#pragma once

// Orchestration of validated scenarios: ensembles, experiment reports,
// manifests and plot-ready tables.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "snslab/scenario.hpp"

namespace snslab {

enum ExitCode : int {
    exit_success = 0,
    exit_failure = 1,
    exit_validation = 2,
    exit_blowup = 3,
};

struct RunOptions {
    std::optional<std::filesystem::path> output_dir;  ///< overrides the config
    std::optional<int> workers;                       ///< overrides the config
    /// Restricts the run to these experiments (all configured ones when empty).
    std::vector<std::string> only;
    /// Overrides the epsilon list of the sweep experiment.
    std::optional<std::vector<double>> epsilons;
    bool timestamps = true;  ///< record a creation time in the manifest
};

struct RunResult {
    int exit_code = exit_success;
    std::filesystem::path directory;
    std::vector<std::string> artifacts;  ///< relative file names, in write order
    int blown_up = 0;
    std::vector<std::string> messages;
};

/// Executes every requested experiment and writes reports plus manifest.json.
/// Numeric outputs depend only on (config, seed).
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Writes tidy CSV tables for plotting into <dir>/plot and returns their
/// paths. Throws std::runtime_error when no report is found.
std::vector<std::filesystem::path> emit_plotdata(const std::filesystem::path& dir);

/// Worker count from the SNSLAB_WORKERS environment variable, if set and valid.
std::optional<int> workers_from_environment();

}  // namespace snslab

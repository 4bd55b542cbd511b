#pragma once

// Scenario files: JSON documents with schema id "snslab.scenario/1" that fix
// every physical, numerical and experiment parameter of a run.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "snslab/integrator.hpp"

namespace snslab {

inline constexpr const char* scenario_schema = "snslab.scenario/1";

struct EnsembleConfig {
    int paths = 20;
    std::uint64_t seed = 1;
    int workers = 1;
    int blowup_budget = 0;  ///< tolerated number of blown-up paths per run
};

struct OutputConfig {
    std::string directory = "snslab-out";
    std::vector<std::string> formats{"json", "csv"};
};

struct ScenarioConfig {
    std::string name;
    nlohmann::json document;  ///< canonical input document
    std::string hash;         ///< SHA-256 of the canonical text, hex

    DynamicsSpec dynamics;
    StepperConfig stepper;
    double horizon = 1.0;
    SpectralState initial;
    int initial_regime = 0;
    nlohmann::json experiments = nlohmann::json::object();
    EnsembleConfig ensemble;
    OutputConfig output;

    double K = 0.0;
    double K_crit = 0.0;
    double F = 0.0;
    std::vector<std::string> warnings;

    bool wants(const std::string& experiment) const { return experiments.contains(experiment); }
    /// Experiment parameter block (empty object when absent).
    nlohmann::json experiment(const std::string& name) const;
    /// Resolved values echoed back to the user: regenerated generator
    /// diagonal, K, K_crit, F, hash and warnings.
    nlohmann::json resolved() const;
};

struct ValidationResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;  ///< complete list; empty iff config is set
    std::vector<std::string> warnings;

    bool ok() const { return config.has_value(); }
};

/// Parses and validates a scenario document, collecting every violation.
ValidationResult validate_config(const std::string& text);

/// Sorted keys, no whitespace. Idempotent.
std::string canonicalize(const std::string& text);
std::string canonicalize(const nlohmann::json& doc);
/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& data);
std::string scenario_hash(const std::string& text);

/// Rebuilds the dynamics of a validated scenario with a different epsilon.
DynamicsSpec with_epsilon(const DynamicsSpec& spec, double epsilon);

}  // namespace snslab

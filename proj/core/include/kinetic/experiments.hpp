#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kinetic/report.hpp"

namespace kinetic {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Experiment configuration: the parsed JSON document with defaults filled in.
// Keys are documented in docs/config.md; unknown keys are rejected.
struct RunConfig {
    std::string experiment;
    std::uint64_t seed = 7;
    std::string output_dir = ".";
    nlohmann::json params = nlohmann::json::object();

    // Constructs every domain, weight and solver spec the experiment uses and
    // throws ConfigError on the first invalid one.
    void validate() const;

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Defaults for each experiment id; `params` keys not listed here are errors.
nlohmann::json default_params(const std::string& experiment);
const std::vector<std::string>& experiment_ids();

// Dispatch on cfg.experiment. Every report carries cfg.seed and code_version.
ExperimentReport run_experiment(const RunConfig& cfg);

// Individual experiments (params as in default_params).
ExperimentReport run_stretching(const nlohmann::json& p, std::uint64_t seed);
ExperimentReport run_kernel_bounds(const nlohmann::json& p, std::uint64_t seed);
ExperimentReport run_maxwell_flux(const nlohmann::json& p, std::uint64_t seed);
ExperimentReport run_jacobian(const nlohmann::json& p, std::uint64_t seed);
ExperimentReport run_decay_linear(const nlohmann::json& p, std::uint64_t seed);
ExperimentReport run_decay_nonlinear(const nlohmann::json& p, std::uint64_t seed);
ExperimentReport run_decay_split(const nlohmann::json& p, std::uint64_t seed);
ExperimentReport run_poisson_scaling(const nlohmann::json& p, std::uint64_t seed);

// Writes <dir>/<experiment>.csv and <dir>/<experiment>.json.
void write_artifacts(const ExperimentReport& r, const std::string& dir);

} // namespace kinetic

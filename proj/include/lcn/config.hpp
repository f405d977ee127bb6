#pragma once

// Experiment configuration: a JSON tree with env, agent and metrics blocks,
// an output directory and a list of seeds. Unknown keys are rejected and
// relative paths resolve against the config file's directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcn/agent.hpp"
#include "lcn/environment.hpp"
#include "lcn/tndp.hpp"

namespace lcn::config {

struct EnvConfig {
    std::string type = "dst";  // "dst" or "tndp"

    // dst
    std::string dst_map = "concave";
    std::size_t max_steps = 100;

    // tndp
    tndp::CityFiles city;
    std::size_t start_cell = 0;
    std::size_t episode_len = 0;
};

struct ExperimentConfig {
    EnvConfig env;
    agent::AgentConfig agent;     // agent.lambda holds lambdas.front()
    std::vector<double> lambdas;  // one run per (lambda, seed)
    std::filesystem::path output_dir = "runs";
    std::vector<std::uint64_t> seeds{0};
    nlohmann::json resolved;      // the tree after overrides, for manifests
};

/// Variables named LCN_<BLOCK>_<KEY> (block in ENV, AGENT, METRICS) or
/// LCN_OUTPUT_DIR / LCN_SEEDS replace the matching key. Values are parsed as
/// JSON when possible and taken as strings otherwise.
using Overrides = std::map<std::string, std::string>;

/// LCN_* entries of the process environment.
Overrides environment_overrides();

void apply_overrides(nlohmann::json& tree, const Overrides& overrides);

/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(nlohmann::json tree, const std::filesystem::path& base_dir,
                              const Overrides& overrides = {});

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides);

/// Default configuration for a named built-in environment ("dst").
ExperimentConfig builtin_config(const std::string& env_type, const Overrides& overrides = {});

std::unique_ptr<Environment> make_environment(const EnvConfig& env);

/// Parses direction names ("N", "NE", ...) into a mask.
tndp::ActionMask parse_directions(const std::vector<std::string>& names);

}  // namespace lcn::config

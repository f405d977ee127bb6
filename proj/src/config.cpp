#include "lcn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "lcn/dst.hpp"
#include "lcn/errors.hpp"

extern char** environ;

namespace lcn::config {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTopKeys{"env", "agent", "metrics", "output_dir", "seeds"};
const std::set<std::string> kDstKeys{"type", "map", "max_steps"};
const std::set<std::string> kTndpKeys{"type",       "grid_rows",   "grid_cols",  "od_file",
                                      "groups_file", "mask_file",  "start_cell", "episode_len",
                                      "n_groups",   "allowed_directions"};
const std::set<std::string> kAgentKeys{
    "filter_mode",    "lambda",        "buffer_size",       "batch_size",
    "learning_rate",  "optimizer",     "hidden_dims",       "model_updates",
    "episodes_per_iteration",          "total_steps",       "crowding_threshold",
    "crowding_penalty", "eval_period", "return_scale"};
const std::set<std::string> kMetricsKeys{"ref_point", "n_weights"};

void reject_unknown(const json& block, const std::set<std::string>& allowed,
                    const std::string& prefix) {
    if (!block.is_object()) throw ConfigError("'" + prefix + "' must be an object");
    for (const auto& [key, _] : block.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + prefix + key + "'");
    }
}

template <class T>
T get(const json& block, const std::string& key, const std::string& prefix) {
    try {
        return block.at(key).get<T>();
    } catch (const json::out_of_range&) {
        throw ConfigError("missing required key '" + prefix + key + "'");
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + prefix + key + "': " + e.what());
    }
}

template <class T>
void get_optional(const json& block, const std::string& key, const std::string& prefix, T& out) {
    if (block.contains(key) && !block.at(key).is_null()) out = get<T>(block, key, prefix);
}

std::size_t get_size(const json& block, const std::string& key, const std::string& prefix) {
    const auto v = get<std::int64_t>(block, key, prefix);
    if (v < 0) throw ConfigError("'" + prefix + key + "' must be nonnegative");
    return static_cast<std::size_t>(v);
}

fs::path existing_file(const json& block, const std::string& key, const fs::path& base) {
    fs::path p = get<std::string>(block, key, "env.");
    if (p.is_relative()) p = base / p;
    if (!fs::is_regular_file(p)) {
        throw ConfigError("env." + key + ": file not found: " + p.string());
    }
    return p;
}

EnvConfig parse_env(const json& block, const fs::path& base) {
    EnvConfig env;
    if (!block.is_object()) throw ConfigError("'env' must be an object");
    env.type = get<std::string>(block, "type", "env.");
    if (env.type == "dst") {
        reject_unknown(block, kDstKeys, "env.");
        get_optional(block, "map", "env.", env.dst_map);
        if (env.dst_map != "standard" && env.dst_map != "concave") {
            throw ConfigError("env.map must be 'standard' or 'concave'");
        }
        if (block.contains("max_steps")) env.max_steps = get_size(block, "max_steps", "env.");
        if (env.max_steps == 0) throw ConfigError("env.max_steps must be positive");
        return env;
    }
    if (env.type != "tndp") throw ConfigError("env.type must be 'dst' or 'tndp'");
    reject_unknown(block, kTndpKeys, "env.");
    env.city.rows = get_size(block, "grid_rows", "env.");
    env.city.cols = get_size(block, "grid_cols", "env.");
    if (env.city.rows == 0 || env.city.cols == 0) throw ConfigError("env grid must be non-empty");
    env.city.od_file = existing_file(block, "od_file", base);
    env.city.groups_file = existing_file(block, "groups_file", base);
    if (block.contains("mask_file") && !block["mask_file"].is_null()) {
        env.city.mask_file = existing_file(block, "mask_file", base);
    }
    if (block.contains("n_groups") && !block["n_groups"].is_null()) {
        env.city.n_groups = get_size(block, "n_groups", "env.");
        if (*env.city.n_groups < 2) throw ConfigError("env.n_groups must be at least 2");
    }
    if (block.contains("allowed_directions")) {
        env.city.allowed_directions =
            parse_directions(get<std::vector<std::string>>(block, "allowed_directions", "env."));
    }
    env.start_cell = get_size(block, "start_cell", "env.");
    if (env.start_cell >= env.city.rows * env.city.cols) {
        throw ConfigError("env.start_cell lies outside the grid");
    }
    env.episode_len = get_size(block, "episode_len", "env.");
    if (env.episode_len == 0) throw ConfigError("env.episode_len must be positive");
    return env;
}

void parse_agent(const json& block, ExperimentConfig& cfg) {
    reject_unknown(block, kAgentKeys, "agent.");
    auto& a = cfg.agent;
    const std::string p = "agent.";
    if (block.contains("filter_mode")) {
        try {
            a.filter_mode = agent::parse_filter_mode(get<std::string>(block, "filter_mode", p));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("agent.filter_mode: ") + e.what());
        }
    }
    if (block.contains("lambda")) {
        const json& l = block["lambda"];
        cfg.lambdas = l.is_array() ? get<std::vector<double>>(block, "lambda", p)
                                   : std::vector<double>{get<double>(block, "lambda", p)};
        if (cfg.lambdas.empty()) throw ConfigError("agent.lambda list is empty");
    }
    if (block.contains("buffer_size")) a.buffer_size = get_size(block, "buffer_size", p);
    if (block.contains("batch_size")) a.batch_size = get_size(block, "batch_size", p);
    get_optional(block, "learning_rate", p, a.learning_rate);
    if (block.contains("optimizer")) {
        const auto name = get<std::string>(block, "optimizer", p);
        if (name == "sgd") a.optimizer = nn::OptimizerConfig::Kind::Sgd;
        else if (name == "adam") a.optimizer = nn::OptimizerConfig::Kind::Adam;
        else throw ConfigError("agent.optimizer must be 'sgd' or 'adam'");
    }
    get_optional(block, "hidden_dims", p, a.hidden_dims);
    if (block.contains("model_updates")) a.model_updates = get_size(block, "model_updates", p);
    if (block.contains("episodes_per_iteration")) {
        a.episodes_per_iteration = get_size(block, "episodes_per_iteration", p);
    }
    get_optional(block, "total_steps", p, a.total_steps);
    get_optional(block, "crowding_threshold", p, a.crowding_threshold);
    get_optional(block, "crowding_penalty", p, a.crowding_penalty);
    get_optional(block, "eval_period", p, a.eval_period);
    get_optional(block, "return_scale", p, a.return_scale);
}

json parse_override_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (v.is_discarded()) return json(text);
    return v;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

tndp::ActionMask parse_directions(const std::vector<std::string>& names) {
    static const std::array<const char*, tndp::kDirections> kNames{"N", "NE", "E", "SE",
                                                                  "S", "SW", "W", "NW"};
    tndp::ActionMask mask{};
    for (const auto& n : names) {
        const auto it = std::find(kNames.begin(), kNames.end(), n);
        if (it == kNames.end()) throw ConfigError("unknown direction '" + n + "'");
        mask[static_cast<std::size_t>(it - kNames.begin())] = true;
    }
    return mask;
}

Overrides environment_overrides() {
    Overrides out;
    for (char** e = environ; e && *e; ++e) {
        const std::string entry(*e);
        const auto eq = entry.find('=');
        if (eq == std::string::npos || entry.rfind("LCN_", 0) != 0) continue;
        out[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    return out;
}

void apply_overrides(json& tree, const Overrides& overrides) {
    for (const auto& [name, value] : overrides) {
        if (name.rfind("LCN_", 0) != 0) continue;
        const std::string key = lower(name.substr(4));
        if (key == "output_dir" || key == "seeds") {
            tree[key] = parse_override_value(value);
            continue;
        }
        bool matched = false;
        for (const char* block : {"env", "agent", "metrics"}) {
            const std::string prefix = std::string(block) + "_";
            if (key.rfind(prefix, 0) == 0 && key.size() > prefix.size()) {
                tree[block][key.substr(prefix.size())] = parse_override_value(value);
                matched = true;
                break;
            }
        }
        if (!matched) throw ConfigError("unrecognised override " + name);
    }
}

ExperimentConfig parse_config(json tree, const fs::path& base_dir, const Overrides& overrides) {
    if (!tree.is_object()) throw ConfigError("config must be a JSON object");
    apply_overrides(tree, overrides);
    reject_unknown(tree, kTopKeys, "");

    ExperimentConfig cfg;
    if (!tree.contains("env")) throw ConfigError("missing required key 'env'");
    cfg.env = parse_env(tree["env"], base_dir);
    cfg.lambdas = {cfg.agent.lambda};
    if (tree.contains("agent")) parse_agent(tree["agent"], cfg);
    if (tree.contains("metrics")) {
        const json& m = tree["metrics"];
        reject_unknown(m, kMetricsKeys, "metrics.");
        get_optional(m, "ref_point", "metrics.", cfg.agent.ref_point);
        if (m.contains("n_weights")) cfg.agent.n_weights = get_size(m, "n_weights", "metrics.");
    }
    if (tree.contains("output_dir")) {
        cfg.output_dir = get<std::string>(tree, "output_dir", "");
        if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
    } else {
        cfg.output_dir = base_dir / cfg.output_dir;
    }
    if (tree.contains("seeds")) {
        cfg.seeds = tree["seeds"].is_array()
                        ? get<std::vector<std::uint64_t>>(tree, "seeds", "")
                        : std::vector<std::uint64_t>{get<std::uint64_t>(tree, "seeds", "")};
    }
    if (cfg.seeds.empty()) throw ConfigError("'seeds' is empty");
    if (std::set<std::uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
        throw ConfigError("'seeds' must be distinct");
    }
    for (double l : cfg.lambdas) {
        if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("agent.lambda must lie in [0, 1]");
    }
    cfg.agent.lambda = cfg.lambdas.front();
    cfg.agent.validate();
    cfg.resolved = std::move(tree);
    return cfg;
}

ExperimentConfig load_config(const fs::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json tree = json::parse(in, nullptr, false);
    if (tree.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
    return parse_config(std::move(tree), path.parent_path(), overrides);
}

ExperimentConfig builtin_config(const std::string& env_type, const Overrides& overrides) {
    if (env_type != "dst") {
        throw ConfigError("environment '" + env_type + "' needs a config file");
    }
    // the concave map at the scale of published DST results
    json tree = {{"env", {{"type", "dst"}, {"map", "concave"}}},
                 {"agent", {{"return_scale", {124.0, 19.0}}}},
                 {"metrics", {{"ref_point", {0.0, -200.0}}}}};
    return parse_config(std::move(tree), fs::current_path(), overrides);
}

std::unique_ptr<Environment> make_environment(const EnvConfig& env) {
    if (env.type == "dst") {
        return std::make_unique<dst::DstEnv>(dst::DstMap::by_name(env.dst_map), env.max_steps);
    }
    auto city = std::make_shared<const tndp::CityGrid>(tndp::load_city(env.city));
    if (city->excluded(env.start_cell)) {
        throw ConfigError("env.start_cell is an excluded cell");
    }
    return std::make_unique<tndp::TndpEnv>(city, env.start_cell, env.episode_len);
}

}  // namespace lcn::config

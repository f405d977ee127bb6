#include "lcn/commands.hpp"

#include <fstream>
#include <iostream>

#include "lcn/agent.hpp"
#include "lcn/csv.hpp"
#include "lcn/errors.hpp"
#include "lcn/policy.hpp"

namespace lcn::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

// Runs `body` and turns the library's exceptions into a message and exit code.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
    } catch (const TrainingDiverged& e) {
        err << "training diverged: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return 1;
}

void write_commands(std::ostream& out, const std::vector<agent::Command>& commands) {
    for (const auto& c : commands) {
        for (double v : c.desired_return) out << csv::format_double(v) << ',';
        out << csv::format_double(c.desired_horizon) << '\n';
    }
}

std::vector<agent::Command> read_commands(const fs::path& path, std::size_t n_objectives) {
    std::vector<agent::Command> out;
    for (const auto& row : csv::read_points(path)) {
        if (row.size() != n_objectives + 1) {
            throw std::invalid_argument("commands file " + path.string() + " needs " +
                                        std::to_string(n_objectives + 1) + " columns");
        }
        out.push_back({ObjectiveVector(row.begin(), row.end() - 1), row.back()});
    }
    return out;
}

}  // namespace

ordered_json to_json(const MetricsRecord& r) {
    ordered_json j;
    j["step"] = r.step;
    j["hypervolume"] = r.hypervolume;
    j["eum"] = r.eum;
    j["sen_welfare"] = optional_number(r.sen_welfare);
    j["mean_sen_welfare"] = optional_number(r.mean_sen_welfare);
    j["gini"] = optional_number(r.gini);
    j["total_efficiency"] = optional_number(r.total_efficiency);
    j["front_size"] = r.front_size;
    return j;
}

Relation parse_relation(const std::string& name, double lambda) {
    if (name == "pareto") return Relation::pareto();
    if (name == "lorenz") return Relation::lorenz();
    if (name == "lambda-lorenz" || name == "lambda_lorenz") return Relation::lambda_lorenz(lambda);
    throw std::invalid_argument("unknown relation '" + name +
                                "' (expected pareto, lorenz or lambda-lorenz)");
}

config::ExperimentConfig resolve_experiment(const TrainOptions& o) {
    config::Overrides overrides = o.overrides;
    if (o.seed) overrides["LCN_SEEDS"] = std::to_string(*o.seed);
    if (o.out) overrides["LCN_OUTPUT_DIR"] = json(fs::absolute(*o.out).string()).dump();
    if (o.lambda) overrides["LCN_AGENT_LAMBDA"] = json(*o.lambda).dump();
    if (o.relation) overrides["LCN_AGENT_FILTER_MODE"] = json(*o.relation).dump();
    if (o.config_path) return config::load_config(*o.config_path, overrides);
    if (o.env) return config::builtin_config(*o.env, overrides);
    throw ConfigError("either a config file or --env is required");
}

fs::path run_directory(const config::ExperimentConfig& cfg, double lambda, std::uint64_t seed) {
    fs::path dir = cfg.output_dir;
    if (cfg.lambdas.size() > 1) dir /= "lambda-" + csv::format_double(lambda);
    return dir / std::to_string(seed);
}

int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const config::ExperimentConfig cfg = resolve_experiment(options);
        const auto env = config::make_environment(cfg.env);

        for (double lambda : cfg.lambdas) {
            for (std::uint64_t seed : cfg.seeds) {
                agent::AgentConfig ac = cfg.agent;
                ac.lambda = lambda;
                ac.seed = seed;
                const fs::path dir = run_directory(cfg, lambda, seed);
                fs::create_directories(dir);

                std::ofstream log = open_out(dir / "metrics.jsonl");
                const auto result = agent::train(ac, *env, [&](const MetricsRecord& r) {
                    log << to_json(r).dump() << '\n';
                    log.flush();
                });

                std::ofstream front = open_out(dir / "front.csv");
                csv::write_points(front, result.final_evaluation.front.points);
                std::ofstream commands = open_out(dir / "commands.csv");
                write_commands(commands, result.final_evaluation.commands);
                nn::save_checkpoint(result.params, dir / "checkpoint.json");

                json run_config = cfg.resolved;
                run_config["seeds"] = json::array({seed});
                run_config["agent"]["lambda"] = lambda;
                run_config["output_dir"] = cfg.output_dir.string();
                ordered_json manifest;
                manifest["code_version"] = kVersion;
                manifest["seed"] = seed;
                manifest["lambda"] = lambda;
                manifest["steps"] = result.steps;
                manifest["episodes"] = result.episodes;
                manifest["config"] = run_config;
                std::ofstream mf = open_out(dir / "manifest.json");
                mf << manifest.dump(2) << '\n';

                const MetricsRecord& last = result.logs.back();
                out << dir.string() << ": steps=" << result.steps
                    << " hypervolume=" << csv::format_double(last.hypervolume)
                    << " front_size=" << last.front_size << '\n';
            }
        }
        return 0;
    });
}

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const config::ExperimentConfig cfg = resolve_experiment(options.experiment);
        const auto env = config::make_environment(cfg.env);
        const nn::PolicyParameters params = nn::load_checkpoint(options.checkpoint);
        if (params.obs_dim != env->observation_size() || params.n_actions != env->n_actions() ||
            params.n_objectives != env->n_objectives()) {
            throw std::invalid_argument("checkpoint shape does not match the environment");
        }
        const auto commands = read_commands(options.commands, env->n_objectives());
        const auto result =
            agent::evaluate_commands(params, *env, commands, cfg.agent.relation());

        const ObjectiveVector ref = options.ref ? *options.ref
                                    : cfg.agent.ref_point.empty()
                                        ? ObjectiveVector(env->n_objectives(), 0.0)
                                        : cfg.agent.ref_point;
        const std::size_t n_weights = options.n_weights.value_or(cfg.agent.n_weights);
        if (options.front_out) {
            std::ofstream f = open_out(*options.front_out);
            csv::write_points(f, result.front.points);
        }
        out << to_json(compute_metrics(result.front.points, ref, n_weights)).dump() << '\n';
        return 0;
    });
}

int cmd_fronts(std::istream& in, const std::string& relation, double lambda, bool header,
               std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Relation rel = parse_relation(relation, lambda);
        const auto points = csv::read_points(in, "<input>", header);
        csv::write_points(out, extract_front(points, rel).points);
        return 0;
    });
}

int cmd_metrics(std::istream& in, const ObjectiveVector& ref, std::size_t n_weights, bool header,
                std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto points = csv::read_points(in, "<input>", header);
        if (points.empty()) throw std::invalid_argument("front file holds no points");
        out << to_json(compute_metrics(points, ref, n_weights)).dump() << '\n';
        return 0;
    });
}

int cmd_prepare_od(std::istream& in, std::size_t rows, std::size_t cols,
                   const tndp::MobilityLawParams& params, bool header, std::ostream& out,
                   std::ostream& err) {
    return guarded(err, [&] {
        const std::size_t n = rows * cols;
        if (n == 0) throw std::invalid_argument("grid must be non-empty");
        std::vector<double> density(n, 0.0);
        std::vector<bool> included(n, false);
        for (const auto& row : csv::read_rows(in, header)) {
            if (row.fields.size() != 2) {
                throw ParseError("<input>", row.line, "expected cell,density");
            }
            const long long cell = csv::parse_int(row.fields[0], "<input>", row.line);
            if (cell < 0 || static_cast<std::size_t>(cell) >= n) {
                throw ParseError("<input>", row.line, "cell index outside the grid");
            }
            const double rho = csv::parse_double(row.fields[1], "<input>", row.line);
            density[static_cast<std::size_t>(cell)] = rho;
            included[static_cast<std::size_t>(cell)] = true;
        }
        const auto od = tndp::estimate_od_mobility_law(density, rows, cols, included, params);
        for (std::size_t i = 0; i < n; ++i) {
            if (!included[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || !included[j]) continue;
                out << i << ',' << j << ',' << csv::format_double(od[i * n + j]) << '\n';
            }
        }
        return 0;
    });
}

}  // namespace lcn::cli

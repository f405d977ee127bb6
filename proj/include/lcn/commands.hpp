#pragma once

// Subcommand bodies for the command-line front end. They take streams so that
// tests can drive them without spawning processes, and return exit codes.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcn/config.hpp"
#include "lcn/metrics.hpp"
#include "lcn/tndp.hpp"

namespace lcn::cli {

inline constexpr const char* kVersion = "0.1.0";

nlohmann::ordered_json to_json(const MetricsRecord& record);

/// Options given on the command line that take precedence over the config.
struct TrainOptions {
    std::optional<std::filesystem::path> config_path;
    std::optional<std::string> env;  // built-in environment when no config is given
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<double> lambda;
    std::optional<std::string> relation;  // filter mode
    config::Overrides overrides;
};

/// Resolves config + options into the experiment that cmd_train would run.
config::ExperimentConfig resolve_experiment(const TrainOptions& options);

/// Output directory of one (lambda, seed) run.
std::filesystem::path run_directory(const config::ExperimentConfig& cfg, double lambda,
                                    std::uint64_t seed);

/// Trains one run per (lambda, seed). Each run directory holds metrics.jsonl,
/// front.csv, commands.csv, checkpoint.json and manifest.json.
int cmd_train(const TrainOptions& options, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
    TrainOptions experiment;             // config/env selection
    std::filesystem::path checkpoint;
    std::filesystem::path commands;      // CSV: desired return..., horizon
    std::optional<std::filesystem::path> front_out;
    std::optional<ObjectiveVector> ref;
    std::optional<std::size_t> n_weights;
};

/// Greedy evaluation of a checkpoint; prints one metrics JSON line.
int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);

/// Non-dominated rows of a point CSV under pareto, lorenz or lambda-lorenz.
int cmd_fronts(std::istream& in, const std::string& relation, double lambda, bool header,
               std::ostream& out, std::ostream& err);

/// Metrics record of a front CSV as one JSON line.
int cmd_metrics(std::istream& in, const ObjectiveVector& ref, std::size_t n_weights, bool header,
                std::ostream& out, std::ostream& err);

/// Reads `cell,density` rows (listed cells form the city) and writes
/// `origin,dest,flow` for every ordered pair of distinct listed cells.
int cmd_prepare_od(std::istream& in, std::size_t rows, std::size_t cols,
                   const tndp::MobilityLawParams& params, bool header, std::ostream& out,
                   std::ostream& err);

/// Maps a relation name to a Relation; lambda is used for "lambda-lorenz".
Relation parse_relation(const std::string& name, double lambda);

}  // namespace lcn::cli

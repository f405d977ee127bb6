// Command-line driver: train, evaluate, fronts, metrics, prepare-od.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lcn/commands.hpp"
#include "lcn/config.hpp"
#include "lcn/csv.hpp"

namespace {

// Reads from a file, or stdin for "-".
int with_input(const std::string& path, const std::function<int(std::istream&)>& body) {
    if (path == "-") return body(std::cin);
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << '\n';
        return 1;
    }
    return body(in);
}

void add_experiment_options(CLI::App* cmd, std::string& config,
                            std::string& env) {
    cmd->add_option("--config", config, "Experiment config (JSON)");
    cmd->add_option("--env", env, "Built-in environment used when no config is given (dst)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lorenz-conditioned multi-objective RL toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lcn::cli::kVersion);

    lcn::cli::TrainOptions train;
    std::string config, env_name, out_dir, relation;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda;

    auto* t = app.add_subcommand("train", "Train one run per (lambda, seed)");
    add_experiment_options(t, config, env_name);
    t->add_option("--seed", seed, "Run only this seed");
    t->add_option("--out", out_dir, "Output directory");
    t->add_option("--lambda", lambda, "Single lambda instead of the configured list");
    t->add_option("--relation", relation, "Buffer filter: pareto, lorenz, lorenz_redist, lorenz_mean");

    lcn::cli::EvaluateOptions eval;
    std::string ev_config, ev_env, checkpoint, commands, front_out, ev_ref;
    std::optional<std::size_t> ev_weights;
    auto* e = app.add_subcommand("evaluate", "Greedy evaluation of a checkpoint");
    add_experiment_options(e, ev_config, ev_env);
    e->add_option("--checkpoint", checkpoint, "checkpoint.json")->required();
    e->add_option("--commands", commands, "commands.csv (desired return..., horizon)")->required();
    e->add_option("--out", front_out, "Write the executed front CSV here");
    e->add_option("--ref", ev_ref, "Hypervolume reference point, e.g. 0,-200");
    e->add_option("--weights", ev_weights, "Number of EUM weight vectors");

    std::string fr_input = "-", fr_relation = "pareto";
    double fr_lambda = 0.0;
    bool fr_header = false;
    auto* f = app.add_subcommand("fronts", "Non-dominated subset of a point CSV");
    f->add_option("input", fr_input, "Point CSV, '-' for stdin");
    f->add_option("--relation", fr_relation, "pareto, lorenz or lambda-lorenz");
    f->add_option("--lambda", fr_lambda, "Lambda for lambda-lorenz");
    f->add_flag("--header", fr_header, "Skip the first row");

    std::string me_front, me_ref;
    std::size_t me_weights = 100;
    bool me_header = false;
    auto* m = app.add_subcommand("metrics", "Metrics record of a front CSV");
    m->add_option("--front", me_front, "Front CSV, '-' for stdin")->required();
    m->add_option("--ref", me_ref, "Reference point, e.g. 0,0")->required();
    m->add_option("--weights", me_weights, "Number of EUM weight vectors");
    m->add_flag("--header", me_header, "Skip the first row");

    std::string od_input;
    std::size_t od_rows = 0, od_cols = 0;
    lcn::tndp::MobilityLawParams od_params;
    bool od_header = false;
    auto* p = app.add_subcommand("prepare-od", "Estimate OD flows from cell densities");
    p->add_option("input", od_input, "CSV of cell,density ('-' for stdin)")->required();
    p->add_option("--rows", od_rows, "Grid rows")->required();
    p->add_option("--cols", od_cols, "Grid columns")->required();
    p->add_option("--radius", od_params.cell_radius, "Cell radius");
    p->add_option("--fmin", od_params.f_min, "Minimum visitation frequency");
    p->add_option("--fmax", od_params.f_max, "Maximum visitation frequency");
    p->add_flag("--header", od_header, "Skip the first row");

    CLI11_PARSE(app, argc, argv);

    const auto overrides = lcn::config::environment_overrides();
    auto fill = [&](lcn::cli::TrainOptions& o, const std::string& cfg, const std::string& env) {
        if (!cfg.empty()) o.config_path = cfg;
        if (!env.empty()) o.env = env;
        o.overrides = overrides;
    };

    try {
        if (*t) {
            fill(train, config, env_name);
            train.seed = seed;
            train.lambda = lambda;
            if (!out_dir.empty()) train.out = out_dir;
            if (!relation.empty()) train.relation = relation;
            return lcn::cli::cmd_train(train, std::cout, std::cerr);
        }
        if (*e) {
            fill(eval.experiment, ev_config, ev_env);
            eval.checkpoint = checkpoint;
            eval.commands = commands;
            if (!front_out.empty()) eval.front_out = front_out;
            if (!ev_ref.empty()) eval.ref = lcn::csv::parse_vector(ev_ref);
            eval.n_weights = ev_weights;
            return lcn::cli::cmd_evaluate(eval, std::cout, std::cerr);
        }
        if (*f) {
            return with_input(fr_input, [&](std::istream& in) {
                return lcn::cli::cmd_fronts(in, fr_relation, fr_lambda, fr_header, std::cout,
                                            std::cerr);
            });
        }
        if (*m) {
            const auto ref = lcn::csv::parse_vector(me_ref);
            return with_input(me_front, [&](std::istream& in) {
                return lcn::cli::cmd_metrics(in, ref, me_weights, me_header, std::cout, std::cerr);
            });
        }
        if (*p) {
            return with_input(od_input, [&](std::istream& in) {
                return lcn::cli::cmd_prepare_od(in, od_rows, od_cols, od_params, od_header,
                                                std::cout, std::cerr);
            });
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}

#include "lcn/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lcn/errors.hpp"

namespace lcn::agent {

namespace {

double euclidean(const ObjectiveVector& a, const ObjectiveVector& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
}

}  // namespace

FilterMode parse_filter_mode(const std::string& name) {
    if (name == "pareto") return FilterMode::Pareto;
    if (name == "lorenz") return FilterMode::Lorenz;
    if (name == "lorenz_redist") return FilterMode::LorenzRedist;
    if (name == "lorenz_mean") return FilterMode::LorenzMean;
    throw std::invalid_argument("unknown filter mode '" + name + "'");
}

std::string to_string(FilterMode mode) {
    switch (mode) {
        case FilterMode::Pareto: return "pareto";
        case FilterMode::Lorenz: return "lorenz";
        case FilterMode::LorenzRedist: return "lorenz_redist";
        case FilterMode::LorenzMean: return "lorenz_mean";
    }
    return "unknown";
}

void Trajectory::push(Transition t) {
    if (total.empty()) total.assign(t.reward.size(), 0.0);
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += t.reward[j];
    transitions.push_back(std::move(t));
}

void Trajectory::finalize() {
    returns_to_go.assign(transitions.size(), {});
    ObjectiveVector acc(total.size(), 0.0);
    for (std::size_t t = transitions.size(); t-- > 0;) {
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += transitions[t].reward[j];
        returns_to_go[t] = acc;
    }
}

Relation ScoringConfig::relation() const {
    if (mode == FilterMode::Pareto) return Relation::pareto();
    if (lambda == 0.0) return Relation::lorenz();
    return Relation::lambda_lorenz(lambda);
}

ObjectiveVector redistributed_reference(const std::vector<ObjectiveVector>& returns) {
    if (returns.empty()) throw std::invalid_argument("reference point of an empty buffer");
    std::size_t best = 0;
    double best_sum = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const double s = std::accumulate(returns[i].begin(), returns[i].end(), 0.0);
        if (s > best_sum) {
            best_sum = s;
            best = i;
        }
    }
    const double d = static_cast<double>(returns[best].size());
    return ObjectiveVector(returns[best].size(), best_sum / d);
}

ObjectiveVector mean_reference(const std::vector<ObjectiveVector>& returns,
                               const Relation& relation) {
    const FrontSet front = extract_front(returns, relation);
    if (front.empty()) throw std::invalid_argument("reference point of an empty buffer");
    ObjectiveVector mean(front.points.front().size(), 0.0);
    for (const auto& p : front.points) {
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += p[j];
    }
    for (double& m : mean) m /= static_cast<double>(front.size());
    return mean;
}

std::vector<double> score_experiences(const std::vector<ObjectiveVector>& returns,
                                      const ScoringConfig& scoring) {
    if (returns.empty()) throw std::invalid_argument("cannot score an empty buffer");
    const Relation relation = scoring.relation();
    std::vector<double> dist(returns.size());

    switch (scoring.mode) {
        case FilterMode::Pareto:
        case FilterMode::Lorenz: {
            const FrontSet front = extract_front(returns, relation);
            for (std::size_t i = 0; i < returns.size(); ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& f : front.points) best = std::min(best, euclidean(returns[i], f));
                dist[i] = best;
            }
            break;
        }
        case FilterMode::LorenzRedist:
        case FilterMode::LorenzMean: {
            const ObjectiveVector target = scoring.mode == FilterMode::LorenzRedist
                                               ? redistributed_reference(returns)
                                               : mean_reference(returns, relation);
            for (std::size_t i = 0; i < returns.size(); ++i) dist[i] = euclidean(returns[i], target);
            break;
        }
    }

    const std::vector<double> crowding = crowding_distance(returns);
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (crowding[i] <= scoring.crowding_threshold) {
            dist[i] = 2.0 * (dist[i] + scoring.crowding_penalty);
        }
    }
    return dist;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("buffer capacity must be positive");
}

std::vector<ObjectiveVector> ReplayBuffer::returns() const {
    std::vector<ObjectiveVector> out;
    out.reserve(items_.size());
    for (const auto& t : items_) out.push_back(t.total);
    return out;
}

std::vector<Trajectory> ReplayBuffer::insert(Trajectory trajectory, const ScoringConfig& scoring) {
    if (trajectory.length() == 0) throw std::invalid_argument("cannot store an empty trajectory");
    if (trajectory.returns_to_go.size() != trajectory.length()) trajectory.finalize();
    transitions_ += trajectory.length();
    items_.push_back(std::move(trajectory));

    std::vector<Trajectory> evicted;
    while (items_.size() > capacity_) {
        const auto scores = score_experiences(returns(), scoring);
        // max_element returns the first maximum, i.e. the oldest on ties
        const auto worst = static_cast<std::size_t>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        transitions_ -= items_[worst].length();
        evicted.push_back(std::move(items_[worst]));
        items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    return evicted;
}

std::vector<std::size_t> ReplayBuffer::nondominated(const Relation& relation) const {
    return front_indices(returns(), relation);
}

std::pair<std::size_t, std::size_t> ReplayBuffer::locate(std::size_t flat) const {
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (flat < items_[i].length()) return {i, flat};
        flat -= items_[i].length();
    }
    throw std::out_of_range("transition index past the end of the buffer");
}

Command choose_desired_return(const ReplayBuffer& buffer, const Relation& relation, Rng& rng) {
    if (buffer.empty()) throw std::invalid_argument("cannot choose a command from an empty buffer");
    const auto nd = buffer.nondominated(relation);
    const std::size_t d = buffer.items().front().total.size();

    ObjectiveVector mean(d, 0.0), sq(d, 0.0);
    for (std::size_t i : nd) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += buffer.items()[i].total[j];
    }
    for (double& m : mean) m /= static_cast<double>(nd.size());
    for (std::size_t i : nd) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = buffer.items()[i].total[j] - mean[j];
            sq[j] += dev * dev;
        }
    }

    const Trajectory& picked = buffer.items()[nd[uniform_index(rng, nd.size())]];
    Command cmd;
    cmd.desired_return = picked.total;
    for (std::size_t j = 0; j < d; ++j) {
        const double sigma = std::sqrt(sq[j] / static_cast<double>(nd.size()));
        cmd.desired_return[j] += uniform01(rng) * sigma;
    }
    cmd.desired_horizon = static_cast<double>(picked.length());
    return cmd;
}

Trajectory run_episode(const nn::PolicyParameters& params, Environment& env,
                       ObjectiveVector desired_return, double desired_horizon, bool explore,
                       Rng& rng) {
    if (desired_horizon < 1.0) throw std::invalid_argument("desired horizon must be at least 1");
    env.reset();
    Trajectory traj;
    for (std::size_t t = 0; t < env.max_episode_steps(); ++t) {
        const auto mask = env.action_mask();
        if (std::none_of(mask.begin(), mask.end(), [](char m) { return m != 0; })) break;
        auto obs = env.observation();
        const auto probs = nn::forward(params, obs, desired_horizon, desired_return);
        const std::size_t a = explore ? nn::sample_action(probs, mask, rng)
                                      : nn::greedy_action(probs, mask);
        auto [reward, done] = env.step(a);
        for (std::size_t j = 0; j < desired_return.size(); ++j) desired_return[j] -= reward[j];
        desired_horizon = std::max(desired_horizon - 1.0, 1.0);
        traj.push({std::move(obs), a, std::move(reward)});
        if (done) break;
    }
    traj.finalize();
    return traj;
}

Trajectory random_episode(Environment& env, Rng& rng) {
    env.reset();
    Trajectory traj;
    for (std::size_t t = 0; t < env.max_episode_steps(); ++t) {
        const auto mask = env.action_mask();
        std::vector<std::size_t> allowed;
        for (std::size_t a = 0; a < mask.size(); ++a) {
            if (mask[a]) allowed.push_back(a);
        }
        if (allowed.empty()) break;
        auto obs = env.observation();
        const std::size_t a = allowed[uniform_index(rng, allowed.size())];
        auto [reward, done] = env.step(a);
        traj.push({std::move(obs), a, std::move(reward)});
        if (done) break;
    }
    traj.finalize();
    return traj;
}

ScoringConfig AgentConfig::scoring() const {
    return {filter_mode, lambda, crowding_threshold, crowding_penalty};
}

void AgentConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(what);
    };
    require(lambda >= 0.0 && lambda <= 1.0, "agent.lambda must lie in [0, 1]");
    require(buffer_size > 0, "agent.buffer_size must be positive");
    require(batch_size > 0, "agent.batch_size must be positive");
    require(learning_rate > 0.0, "agent.learning_rate must be positive");
    require(model_updates > 0, "agent.model_updates must be positive");
    require(episodes_per_iteration > 0, "agent.episodes_per_iteration must be positive");
    require(total_steps > 0, "agent.total_steps must be positive");
    require(crowding_threshold >= 0.0, "agent.crowding_threshold must be nonnegative");
    require(crowding_penalty >= 0.0, "agent.crowding_penalty must be nonnegative");
    require(eval_period > 0, "agent.eval_period must be positive");
    require(n_weights > 0, "metrics.n_weights must be positive");
    for (auto h : hidden_dims) require(h > 0, "agent.hidden_dims entries must be positive");
    for (double s : return_scale) require(s > 0.0, "agent.return_scale entries must be positive");
}

EvaluationResult evaluate_commands(const nn::PolicyParameters& params, const Environment& env,
                                   const std::vector<Command>& commands, const Relation& relation) {
    EvaluationResult out;
    out.commands = commands;
    auto work = env.clone();
    Rng unused(0);
    for (const auto& cmd : commands) {
        const Trajectory t =
            run_episode(params, *work, cmd.desired_return, cmd.desired_horizon, false, unused);
        out.executed.push_back(t.length() ? t.total : ObjectiveVector(env.n_objectives(), 0.0));
    }
    out.front = extract_front(out.executed, relation);
    return out;
}

EvaluationResult evaluate_front(const nn::PolicyParameters& params, const Environment& env,
                                const ReplayBuffer& buffer, const Relation& relation) {
    if (buffer.empty()) throw std::invalid_argument("cannot evaluate from an empty buffer");
    std::vector<Command> commands;
    for (std::size_t i : buffer.nondominated(relation)) {
        const auto& item = buffer.items()[i];
        commands.push_back({item.total, static_cast<double>(item.length())});
    }
    return evaluate_commands(params, env, commands, relation);
}

namespace {

nn::TrainBatch sample_batch(const ReplayBuffer& buffer, std::size_t n, Rng& rng) {
    nn::TrainBatch batch;
    batch.reserve(n);
    std::vector<std::size_t> starts;
    std::size_t total = 0;
    for (const auto& item : buffer.items()) {
        starts.push_back(total);
        total += item.length();
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t flat = uniform_index(rng, total);
        const auto it = std::upper_bound(starts.begin(), starts.end(), flat) - 1;
        const auto& item = buffer.items()[static_cast<std::size_t>(it - starts.begin())];
        const std::size_t t = flat - *it;
        batch.push_back({item.transitions[t].observation,
                         static_cast<double>(item.length() - t), item.returns_to_go[t],
                         item.transitions[t].action});
    }
    return batch;
}

}  // namespace

TrainResult train(const AgentConfig& config, const Environment& env, const EvalCallback& on_eval) {
    config.validate();
    const std::size_t d = env.n_objectives();
    if (!config.return_scale.empty() && config.return_scale.size() != d) {
        throw ConfigError("agent.return_scale needs one entry per objective");
    }
    if (!config.ref_point.empty() && config.ref_point.size() != d) {
        throw ConfigError("metrics.ref_point needs one entry per objective");
    }
    const ObjectiveVector ref = config.ref_point.empty() ? ObjectiveVector(d, 0.0) : config.ref_point;
    const ScoringConfig scoring = config.scoring();
    const Relation relation = scoring.relation();

    TrainResult result;
    result.params = nn::init_network(env.observation_size(), d, env.n_actions(), config.hidden_dims,
                                     config.seed, static_cast<double>(env.max_episode_steps()),
                                     config.return_scale);
    result.buffer = ReplayBuffer(config.buffer_size);
    Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
    const nn::OptimizerConfig optimizer{config.optimizer, config.learning_rate};
    nn::OptimizerState opt_state;

    auto work = env.clone();
    const auto max_len = static_cast<std::int64_t>(env.max_episode_steps());
    auto budget_left = [&] { return result.steps + max_len <= config.total_steps; };
    auto store = [&](Trajectory t) {
        result.steps += static_cast<std::int64_t>(t.length());
        ++result.episodes;
        if (t.length() > 0) result.buffer.insert(std::move(t), scoring);
    };

    while (result.buffer.size() < config.buffer_size && budget_left()) {
        store(random_episode(*work, rng));
    }
    if (result.buffer.empty()) {
        throw ConfigError("agent.total_steps is too small for a single warm-up episode");
    }

    auto evaluate = [&] {
        result.final_evaluation = evaluate_front(result.params, env, result.buffer, relation);
        MetricsRecord rec = compute_metrics(result.final_evaluation.front.points, ref,
                                            config.n_weights, result.steps);
        if (on_eval) on_eval(rec);
        result.logs.push_back(rec);
    };

    std::int64_t next_eval = config.eval_period;
    while (budget_left()) {
        for (std::size_t e = 0; e < config.episodes_per_iteration && budget_left(); ++e) {
            const Command cmd = choose_desired_return(result.buffer, relation, rng);
            store(run_episode(result.params, *work, cmd.desired_return, cmd.desired_horizon, true,
                              rng));
        }
        for (std::size_t u = 0; u < config.model_updates; ++u) {
            nn::train_batch(result.params, sample_batch(result.buffer, config.batch_size, rng),
                            optimizer, opt_state);
        }
        if (result.steps >= next_eval) {
            evaluate();
            while (next_eval <= result.steps) next_eval += config.eval_period;
        }
    }
    if (result.logs.empty() || result.logs.back().step != result.steps) evaluate();
    return result;
}

}  // namespace lcn::agent

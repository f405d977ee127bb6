#pragma once

// Lorenz Conditioned Network training: collect experience by conditioning the
// policy on desired returns, keep a bounded replay buffer filtered towards the
// (lambda-)Lorenz front, and fit the policy by supervised imitation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lcn/dominance.hpp"
#include "lcn/environment.hpp"
#include "lcn/metrics.hpp"
#include "lcn/policy.hpp"
#include "lcn/random.hpp"

namespace lcn::agent {

/// How buffer items are scored for eviction. `Pareto` is the PCN-style ablation.
enum class FilterMode { Pareto, Lorenz, LorenzRedist, LorenzMean };

FilterMode parse_filter_mode(const std::string& name);
std::string to_string(FilterMode mode);

struct Transition {
    std::vector<double> observation;
    std::size_t action = 0;
    ObjectiveVector reward;
};

struct Trajectory {
    std::vector<Transition> transitions;
    ObjectiveVector total;                      // undiscounted return
    std::vector<ObjectiveVector> returns_to_go;  // returns_to_go[t] = sum of rewards from t on

    std::size_t length() const { return transitions.size(); }
    /// Appends a step and keeps `total` in sync.
    void push(Transition t);
    /// Fills returns_to_go; call once the episode is over.
    void finalize();
};

struct ScoringConfig {
    FilterMode mode = FilterMode::Lorenz;
    double lambda = 0.0;
    double crowding_threshold = 0.2;
    double crowding_penalty = 1.0;

    /// The dominance relation that defines "non-dominated" in this mode.
    Relation relation() const;
};

/// Eviction keys, higher = evicted first. Base distance is the Euclidean
/// distance to the mode's target (nearest front point, redistributed max-sum
/// return, or mean of the front); items whose crowding distance is at most the
/// threshold score 2 * (distance + penalty).
std::vector<double> score_experiences(const std::vector<ObjectiveVector>& returns,
                                      const ScoringConfig& scoring);

/// Equal split of the largest-sum return over all objectives.
ObjectiveVector redistributed_reference(const std::vector<ObjectiveVector>& returns);

/// Mean of the non-dominated returns under `relation`.
ObjectiveVector mean_reference(const std::vector<ObjectiveVector>& returns,
                               const Relation& relation);

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }
    const std::vector<Trajectory>& items() const { return items_; }
    std::vector<ObjectiveVector> returns() const;
    std::size_t transition_count() const { return transitions_; }

    /// Inserts and, when over capacity, evicts the highest-scoring items
    /// (oldest first on ties). Returns the evicted trajectories.
    std::vector<Trajectory> insert(Trajectory trajectory, const ScoringConfig& scoring);

    /// Indices of items whose returns are non-dominated (one per distinct return).
    std::vector<std::size_t> nondominated(const Relation& relation) const;

    /// Flat transition index -> (item, step).
    std::pair<std::size_t, std::size_t> locate(std::size_t flat) const;

private:
    std::size_t capacity_;
    std::size_t transitions_ = 0;
    std::vector<Trajectory> items_;  // insertion order
};

struct Command {
    ObjectiveVector desired_return;
    double desired_horizon = 1.0;
};

/// Samples a non-dominated buffer return and raises each objective o by
/// U(0, sigma_o), sigma_o the population standard deviation of the
/// non-dominated returns. The horizon is the sampled trajectory's length.
Command choose_desired_return(const ReplayBuffer& buffer, const Relation& relation, Rng& rng);

/// Resets `env` and plays one episode. At each step the policy sees the current
/// command; afterwards the desired return drops by the reward and the horizon
/// by one (never below one). Sampling is mask-aware; greedy when !explore.
Trajectory run_episode(const nn::PolicyParameters& params, Environment& env,
                       ObjectiveVector desired_return, double desired_horizon, bool explore,
                       Rng& rng);

/// Uniformly random allowed actions.
Trajectory random_episode(Environment& env, Rng& rng);

struct AgentConfig {
    FilterMode filter_mode = FilterMode::Lorenz;
    double lambda = 0.0;
    std::size_t buffer_size = 100;
    std::size_t batch_size = 256;
    double learning_rate = 0.01;
    nn::OptimizerConfig::Kind optimizer = nn::OptimizerConfig::Kind::Sgd;
    std::vector<std::size_t> hidden_dims{64, 64};
    std::size_t model_updates = 10;
    std::size_t episodes_per_iteration = 10;
    std::int64_t total_steps = 30000;
    double crowding_threshold = 0.2;
    double crowding_penalty = 1.0;
    std::int64_t eval_period = 1000;
    std::uint64_t seed = 0;
    /// Divisors for the desired return fed to the network; empty means ones.
    std::vector<double> return_scale;
    /// Hypervolume reference point; empty means the origin.
    ObjectiveVector ref_point;
    std::size_t n_weights = 100;

    ScoringConfig scoring() const;
    Relation relation() const { return scoring().relation(); }
    /// Throws ConfigError.
    void validate() const;
};

struct EvaluationResult {
    FrontSet front;                           // non-dominated executed returns
    std::vector<ObjectiveVector> executed;    // one per command, in order
    std::vector<Command> commands;
};

/// One greedy episode per non-dominated buffer return, conditioned on that
/// return and its trajectory length; the front is extracted under `relation`.
EvaluationResult evaluate_front(const nn::PolicyParameters& params, const Environment& env,
                                const ReplayBuffer& buffer, const Relation& relation);

/// Greedy episodes for explicit commands.
EvaluationResult evaluate_commands(const nn::PolicyParameters& params, const Environment& env,
                                   const std::vector<Command>& commands, const Relation& relation);

struct TrainResult {
    nn::PolicyParameters params;
    ReplayBuffer buffer{1};
    std::vector<MetricsRecord> logs;
    EvaluationResult final_evaluation;
    std::int64_t steps = 0;
    std::size_t episodes = 0;
};

using EvalCallback = std::function<void(const MetricsRecord&)>;

/// Full training run. Collection steps (warm-up and exploration) never exceed
/// config.total_steps; evaluation episodes are not counted.
TrainResult train(const AgentConfig& config, const Environment& env,
                  const EvalCallback& on_eval = {});

}  // namespace lcn::agent

#pragma once

// Return-conditioned policy network: a feed-forward net mapping
// (observation, desired horizon, desired return) to a distribution over
// discrete actions, trained by cross-entropy with hand-written backprop.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lcn/random.hpp"

namespace lcn::nn {

struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
};

/// Network weights plus the fixed input scaling. Inputs are
/// [observation, horizon / horizon_scale, desired_return ./ return_scale].
struct PolicyParameters {
    std::size_t obs_dim = 0;
    std::size_t n_objectives = 0;
    std::size_t n_actions = 0;
    std::vector<std::size_t> hidden_dims;
    double horizon_scale = 1.0;
    std::vector<double> return_scale;
    std::vector<Layer> layers;

    std::size_t input_dim() const { return obs_dim + 1 + n_objectives; }
    std::size_t parameter_count() const;
};

struct Sample {
    std::vector<double> observation;
    double horizon = 0.0;
    std::vector<double> desired_return;
    std::size_t action = 0;
};

using TrainBatch = std::vector<Sample>;

/// Rectifier hidden layers, weights uniform in +-sqrt(6 / (fan_in + fan_out)),
/// zero biases. `return_scale` defaults to ones.
PolicyParameters init_network(std::size_t obs_dim, std::size_t n_objectives, std::size_t n_actions,
                              const std::vector<std::size_t>& hidden_dims, std::uint64_t seed,
                              double horizon_scale = 1.0, std::vector<double> return_scale = {});

/// Action probabilities for one input. Throws std::invalid_argument on shape mismatch.
std::vector<double> forward(const PolicyParameters& params, std::span<const double> observation,
                            double horizon, std::span<const double> desired_return);

/// Raw logits for one input.
std::vector<double> logits(const PolicyParameters& params, std::span<const double> observation,
                           double horizon, std::span<const double> desired_return);

/// Gradient of the batch loss, same shapes as params.layers.
using Gradient = std::vector<Layer>;

/// Batch-mean negative log-likelihood of the labelled actions.
double batch_loss(const PolicyParameters& params, const TrainBatch& batch);

/// Loss and its analytic gradient.
std::pair<double, Gradient> loss_and_gradient(const PolicyParameters& params,
                                              const TrainBatch& batch);

struct OptimizerConfig {
    enum class Kind { Sgd, Adam };
    Kind kind = Kind::Sgd;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment estimates for the adaptive optimizer; unused by plain SGD.
struct OptimizerState {
    Gradient first;
    Gradient second;
    std::int64_t steps = 0;
};

/// One optimizer step on the batch. Returns the loss before the step and
/// throws TrainingDiverged when it is not finite.
double train_batch(PolicyParameters& params, const TrainBatch& batch,
                   const OptimizerConfig& optimizer, OptimizerState& state);

/// Plain SGD step.
double train_batch(PolicyParameters& params, const TrainBatch& batch, double learning_rate);

/// Draw from `probs` restricted to allowed actions (renormalised).
/// Throws ContractViolation when every action is masked.
std::size_t sample_action(std::span<const double> probs, std::span<const char> mask, Rng& rng);
std::size_t sample_action(std::span<const double> probs, Rng& rng);

/// Most probable allowed action, lowest index on ties.
std::size_t greedy_action(std::span<const double> probs, std::span<const char> mask);
std::size_t greedy_action(std::span<const double> probs);

/// JSON checkpoint with an explicit shape header.
void save_checkpoint(const PolicyParameters& params, std::ostream& out);
void save_checkpoint(const PolicyParameters& params, const std::filesystem::path& path);
PolicyParameters load_checkpoint(std::istream& in);
PolicyParameters load_checkpoint(const std::filesystem::path& path);

}  // namespace lcn::nn

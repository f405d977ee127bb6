#include "lcn/policy.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lcn/errors.hpp"

namespace lcn::nn {

namespace {

constexpr const char* kCheckpointFormat = "lcn-policy";
constexpr int kCheckpointVersion = 1;

void check_input(const PolicyParameters& p, std::size_t obs, std::size_t ret) {
    if (obs != p.obs_dim || ret != p.n_objectives) {
        throw std::invalid_argument("policy input shape mismatch: got observation " +
                                    std::to_string(obs) + " / return " + std::to_string(ret) +
                                    ", expected " + std::to_string(p.obs_dim) + " / " +
                                    std::to_string(p.n_objectives));
    }
}

void write_input(const PolicyParameters& p, Eigen::Ref<Eigen::VectorXd> col,
                 std::span<const double> obs, double horizon, std::span<const double> ret) {
    check_input(p, obs.size(), ret.size());
    for (std::size_t i = 0; i < obs.size(); ++i) col[static_cast<Eigen::Index>(i)] = obs[i];
    col[static_cast<Eigen::Index>(p.obs_dim)] = horizon / p.horizon_scale;
    for (std::size_t j = 0; j < ret.size(); ++j) {
        col[static_cast<Eigen::Index>(p.obs_dim + 1 + j)] = ret[j] / p.return_scale[j];
    }
}

Eigen::MatrixXd batch_inputs(const PolicyParameters& p, const TrainBatch& batch) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(p.input_dim()),
                      static_cast<Eigen::Index>(batch.size()));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& s = batch[i];
        write_input(p, x.col(static_cast<Eigen::Index>(i)), s.observation, s.horizon,
                    s.desired_return);
        if (s.action >= p.n_actions) throw std::invalid_argument("action label out of range");
    }
    return x;
}

// Pre-activations of every layer; activations[0] is the input.
struct Trace {
    std::vector<Eigen::MatrixXd> activations;
    Eigen::MatrixXd logits;
};

Trace run(const PolicyParameters& p, Eigen::MatrixXd x) {
    Trace t;
    t.activations.push_back(std::move(x));
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        Eigen::MatrixXd z = p.layers[l].weights * t.activations.back();
        z.colwise() += p.layers[l].bias;
        if (l + 1 == p.layers.size()) {
            t.logits = std::move(z);
        } else {
            t.activations.push_back(z.cwiseMax(0.0));
        }
    }
    return t;
}

// Column-wise softmax.
Eigen::MatrixXd softmax(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd e = (z.rowwise() - z.colwise().maxCoeff()).array().exp().matrix();
    const Eigen::RowVectorXd sums = e.colwise().sum();
    for (Eigen::Index c = 0; c < e.cols(); ++c) e.col(c) /= sums[c];
    return e;
}

double mean_nll(const Eigen::MatrixXd& z, const TrainBatch& batch) {
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto col = z.col(static_cast<Eigen::Index>(i));
        const double m = col.maxCoeff();
        const double lse = m + std::log((col.array() - m).exp().sum());
        loss += lse - col[static_cast<Eigen::Index>(batch[i].action)];
    }
    return loss / static_cast<double>(batch.size());
}

Gradient zeros_like(const PolicyParameters& p) {
    Gradient g;
    for (const auto& l : p.layers) {
        g.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                     Eigen::VectorXd::Zero(l.bias.size())});
    }
    return g;
}

}  // namespace

std::size_t PolicyParameters::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

PolicyParameters init_network(std::size_t obs_dim, std::size_t n_objectives, std::size_t n_actions,
                              const std::vector<std::size_t>& hidden_dims, std::uint64_t seed,
                              double horizon_scale, std::vector<double> return_scale) {
    if (obs_dim == 0 || n_objectives == 0 || n_actions == 0) {
        throw std::invalid_argument("network dimensions must be positive");
    }
    for (auto h : hidden_dims) {
        if (h == 0) throw std::invalid_argument("hidden layer widths must be positive");
    }
    if (return_scale.empty()) return_scale.assign(n_objectives, 1.0);
    if (return_scale.size() != n_objectives) {
        throw std::invalid_argument("return scale needs one entry per objective");
    }
    for (double s : return_scale) {
        if (!(s > 0.0)) throw std::invalid_argument("return scales must be positive");
    }
    if (!(horizon_scale > 0.0)) throw std::invalid_argument("horizon scale must be positive");

    PolicyParameters p;
    p.obs_dim = obs_dim;
    p.n_objectives = n_objectives;
    p.n_actions = n_actions;
    p.hidden_dims = hidden_dims;
    p.horizon_scale = horizon_scale;
    p.return_scale = std::move(return_scale);

    Rng rng(seed);
    std::size_t fan_in = p.input_dim();
    std::vector<std::size_t> widths = hidden_dims;
    widths.push_back(n_actions);
    for (std::size_t fan_out : widths) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Layer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                layer.weights(r, c) = uniform(rng, -bound, bound);
            }
        }
        p.layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return p;
}

std::vector<double> logits(const PolicyParameters& params, std::span<const double> observation,
                           double horizon, std::span<const double> desired_return) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(params.input_dim()));
    write_input(params, x, observation, horizon, desired_return);
    const Trace t = run(params, std::move(x));
    return std::vector<double>(t.logits.data(), t.logits.data() + t.logits.size());
}

std::vector<double> forward(const PolicyParameters& params, std::span<const double> observation,
                            double horizon, std::span<const double> desired_return) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(params.input_dim()));
    write_input(params, x, observation, horizon, desired_return);
    const Eigen::MatrixXd probs = softmax(run(params, std::move(x)).logits);
    return std::vector<double>(probs.data(), probs.data() + probs.size());
}

double batch_loss(const PolicyParameters& params, const TrainBatch& batch) {
    if (batch.empty()) throw std::invalid_argument("empty training batch");
    return mean_nll(run(params, batch_inputs(params, batch)).logits, batch);
}

std::pair<double, Gradient> loss_and_gradient(const PolicyParameters& params,
                                              const TrainBatch& batch) {
    if (batch.empty()) throw std::invalid_argument("empty training batch");
    const Trace t = run(params, batch_inputs(params, batch));
    const double loss = mean_nll(t.logits, batch);

    const double inv_n = 1.0 / static_cast<double>(batch.size());
    Eigen::MatrixXd delta = softmax(t.logits);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        delta(static_cast<Eigen::Index>(batch[i].action), static_cast<Eigen::Index>(i)) -= 1.0;
    }
    delta *= inv_n;

    Gradient grad = zeros_like(params);
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const Eigen::MatrixXd& input = t.activations[l];
        grad[l].weights = delta * input.transpose();
        grad[l].bias = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = params.layers[l].weights.transpose() * delta;
            // rectifier derivative: pass where the activation was positive
            delta = (input.array() > 0.0).select(back, 0.0);
        }
    }
    return {loss, std::move(grad)};
}

double train_batch(PolicyParameters& params, const TrainBatch& batch,
                   const OptimizerConfig& optimizer, OptimizerState& state) {
    if (!(optimizer.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    auto [loss, grad] = loss_and_gradient(params, batch);
    if (!std::isfinite(loss)) throw TrainingDiverged("training loss is not finite");

    const double lr = optimizer.learning_rate;
    if (optimizer.kind == OptimizerConfig::Kind::Sgd) {
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            params.layers[l].weights -= lr * grad[l].weights;
            params.layers[l].bias -= lr * grad[l].bias;
        }
        return loss;
    }

    if (state.first.empty()) {
        state.first = zeros_like(params);
        state.second = zeros_like(params);
    }
    ++state.steps;
    const double b1 = optimizer.beta1, b2 = optimizer.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.steps));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.steps));
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + optimizer.epsilon);
    };
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        update(params.layers[l].weights, state.first[l].weights, state.second[l].weights,
               grad[l].weights);
        update(params.layers[l].bias, state.first[l].bias, state.second[l].bias, grad[l].bias);
    }
    return loss;
}

double train_batch(PolicyParameters& params, const TrainBatch& batch, double learning_rate) {
    OptimizerState unused;
    return train_batch(params, batch, {OptimizerConfig::Kind::Sgd, learning_rate}, unused);
}

std::size_t sample_action(std::span<const double> probs, std::span<const char> mask, Rng& rng) {
    if (mask.size() != probs.size()) throw std::invalid_argument("mask size mismatch");
    double total = 0.0;
    std::size_t allowed = 0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        if (mask[a]) {
            total += probs[a];
            ++allowed;
        }
    }
    if (allowed == 0) throw ContractViolation("every action is masked");
    if (!(total > 0.0)) {
        // all allowed actions have zero probability: fall back to uniform
        std::size_t k = uniform_index(rng, allowed);
        for (std::size_t a = 0; a < probs.size(); ++a) {
            if (mask[a] && k-- == 0) return a;
        }
    }
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        if (!mask[a]) continue;
        acc += probs[a];
        last = a;
        if (u < acc) return a;
    }
    return last;
}

std::size_t sample_action(std::span<const double> probs, Rng& rng) {
    const std::vector<char> all(probs.size(), 1);
    return sample_action(probs, all, rng);
}

std::size_t greedy_action(std::span<const double> probs, std::span<const char> mask) {
    if (mask.size() != probs.size()) throw std::invalid_argument("mask size mismatch");
    std::size_t best = probs.size();
    for (std::size_t a = 0; a < probs.size(); ++a) {
        if (mask[a] && (best == probs.size() || probs[a] > probs[best])) best = a;
    }
    if (best == probs.size()) throw ContractViolation("every action is masked");
    return best;
}

std::size_t greedy_action(std::span<const double> probs) {
    const std::vector<char> all(probs.size(), 1);
    return greedy_action(probs, all);
}

void save_checkpoint(const PolicyParameters& params, std::ostream& out) {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["obs_dim"] = params.obs_dim;
    j["n_objectives"] = params.n_objectives;
    j["n_actions"] = params.n_actions;
    j["hidden_dims"] = params.hidden_dims;
    j["horizon_scale"] = params.horizon_scale;
    j["return_scale"] = params.return_scale;
    j["layers"] = nlohmann::json::array();
    for (const auto& l : params.layers) {
        std::vector<double> w(static_cast<std::size_t>(l.weights.size()));
        // row-major on disk
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
                w[static_cast<std::size_t>(r * l.weights.cols() + c)] = l.weights(r, c);
            }
        }
        j["layers"].push_back({{"rows", l.weights.rows()},
                               {"cols", l.weights.cols()},
                               {"weights", w},
                               {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    out << j.dump() << '\n';
}

void save_checkpoint(const PolicyParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    save_checkpoint(params, out);
}

PolicyParameters load_checkpoint(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("checkpoint", 0, e.what());
    }
    if (j.value("format", "") != kCheckpointFormat) throw ParseError("checkpoint", 0, "not a policy checkpoint");
    if (j.value("version", 0) != kCheckpointVersion) throw ParseError("checkpoint", 0, "unsupported version");
    try {
        PolicyParameters p;
        p.obs_dim = j.at("obs_dim").get<std::size_t>();
        p.n_objectives = j.at("n_objectives").get<std::size_t>();
        p.n_actions = j.at("n_actions").get<std::size_t>();
        p.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
        p.horizon_scale = j.at("horizon_scale").get<double>();
        p.return_scale = j.at("return_scale").get<std::vector<double>>();
        std::size_t fan_in = p.input_dim();
        std::vector<std::size_t> widths = p.hidden_dims;
        widths.push_back(p.n_actions);
        const auto& layers = j.at("layers");
        if (layers.size() != widths.size() || p.return_scale.size() != p.n_objectives) {
            throw ParseError("checkpoint", 0, "layer count does not match the shape header");
        }
        for (std::size_t l = 0; l < widths.size(); ++l) {
            const auto& lj = layers[l];
            const auto rows = lj.at("rows").get<std::size_t>();
            const auto cols = lj.at("cols").get<std::size_t>();
            const auto w = lj.at("weights").get<std::vector<double>>();
            const auto b = lj.at("bias").get<std::vector<double>>();
            if (rows != widths[l] || cols != fan_in || w.size() != rows * cols || b.size() != rows) {
                throw ParseError("checkpoint", 0, "layer " + std::to_string(l) + " has the wrong shape");
            }
            Layer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) {
                    layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w[r * cols + c];
                }
                layer.bias[static_cast<Eigen::Index>(r)] = b[r];
            }
            p.layers.push_back(std::move(layer));
            fan_in = rows;
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("checkpoint", 0, e.what());
    }
}

PolicyParameters load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open checkpoint");
    return load_checkpoint(in);
}

}  // namespace lcn::nn

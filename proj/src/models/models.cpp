#include "mstep/models/models.hpp"

#include "mstep/nn/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mstep::models {

StateNormalizer::StateNormalizer(int dim)
    : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

void StateNormalizer::observe(const State& s) {
  if (s.size() != mean_.size()) throw std::invalid_argument("StateNormalizer: dimension mismatch");
  ++count_;
  const Eigen::VectorXd delta = s - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta.cwiseProduct(s - mean_);
}

void StateNormalizer::observe(const Episode& episode) {
  for (const State& s : episode.states) observe(s);
}

Eigen::VectorXd StateNormalizer::stddev() const {
  if (count_ < 2) return Eigen::VectorXd::Ones(mean_.size());
  Eigen::VectorXd sd = (m2_ / static_cast<double>(count_ - 1)).cwiseSqrt();
  return sd.cwiseMax(1e-6);
}

Eigen::VectorXd StateNormalizer::apply(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  if (count_ == 0) return s;
  return (s - mean_).cwiseQuotient(stddev());
}

Eigen::VectorXd encode_state_actions(const Eigen::Ref<const Eigen::VectorXd>& state,
                                     std::span<const int> actions, int action_count) {
  const Eigen::Index dim = state.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim + static_cast<Eigen::Index>(actions.size()) *
                                                      action_count);
  x.head(dim) = state;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const int a = actions[i];
    if (a < 0 || a >= action_count) {
      throw std::out_of_range("encode_state_actions: action " + std::to_string(a) +
                              " out of range");
    }
    x[dim + static_cast<Eigen::Index>(i) * action_count + a] = 1.0;
  }
  return x;
}

std::vector<int> layer_layout(int input, int hidden_units, int hidden_layers, int output) {
  if (hidden_layers < 0) throw std::invalid_argument("layer_layout: negative hidden layer count");
  std::vector<int> sizes{input};
  for (int i = 0; i < hidden_layers; ++i) sizes.push_back(hidden_units);
  sizes.push_back(output);
  return sizes;
}

// ---------------------------------------------------------------------------

TransitionNet::TransitionNet(int state_dim, int action_count, int length,
                             const ModelOptions& options, std::uint64_t seed)
    : state_dim_(state_dim),
      action_count_(action_count),
      length_(length),
      options_(options),
      net_(layer_layout(state_dim + length * action_count, options.hidden_units,
                        options.hidden_layers, state_dim),
           {options.activation, nn::OutputActivation::identity}, seed),
      normalizer_(state_dim) {
  if (state_dim <= 0 || action_count < 1 || length < 1) {
    throw std::invalid_argument("TransitionNet: invalid dimensions");
  }
}

State TransitionNet::predict(const State& state, std::span<const int> actions) const {
  if (static_cast<int>(actions.size()) != length_) {
    throw std::invalid_argument("TransitionNet: expected " + std::to_string(length_) +
                                " actions, got " + std::to_string(actions.size()));
  }
  if (state.size() != state_dim_) throw std::invalid_argument("TransitionNet: state size mismatch");
  const Eigen::VectorXd in = options_.normalize_inputs ? normalizer_.apply(state) : state;
  State out = net_.forward(encode_state_actions(in, actions, action_count_));
  if (options_.target == PredictionTarget::delta) out += state;
  return out;
}

Eigen::MatrixXd TransitionNet::encode_batch(const Eigen::Ref<const Eigen::MatrixXd>& states,
                                            const std::vector<std::vector<int>>& actions) const {
  if (states.rows() != state_dim_ || static_cast<std::size_t>(states.cols()) != actions.size()) {
    throw std::invalid_argument("TransitionNet: batch shape mismatch");
  }
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(net_.input_size(), states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    const auto& seq = actions[static_cast<std::size_t>(c)];
    if (static_cast<int>(seq.size()) != length_) {
      throw std::invalid_argument("TransitionNet: action sequence length mismatch");
    }
    x.col(c).head(state_dim_) =
        options_.normalize_inputs ? normalizer_.apply(states.col(c)) : Eigen::VectorXd(states.col(c));
    for (int i = 0; i < length_; ++i) {
      const int a = seq[static_cast<std::size_t>(i)];
      if (a < 0 || a >= action_count_) throw std::out_of_range("TransitionNet: action out of range");
      x(state_dim_ + i * action_count_ + a, c) = 1.0;
    }
  }
  return x;
}

Eigen::MatrixXd TransitionNet::predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& states,
                                             const std::vector<std::vector<int>>& actions) const {
  Eigen::MatrixXd out = net_.forward_batch(encode_batch(states, actions));
  if (options_.target == PredictionTarget::delta) out += states;
  return out;
}

double TransitionNet::train_batch(const MultiStepBatch& batch, nn::Optimizer& optimizer) {
  if (batch.horizon != length_) throw std::invalid_argument("TransitionNet: batch horizon mismatch");
  const Eigen::MatrixXd inputs = encode_batch(batch.start_states, batch.actions);
  const Eigen::MatrixXd targets = options_.target == PredictionTarget::delta
                                      ? Eigen::MatrixXd(batch.end_states - batch.start_states)
                                      : batch.end_states;
  double loss = 0.0;
  const nn::Gradients grads = net_.forward_backward(inputs, [&](const Eigen::MatrixXd& out) {
    auto lg = nn::mse_loss_grad_batch(out, targets);
    loss = lg.loss;
    return lg.grad;
  });
  if (!std::isfinite(loss)) {
    throw DivergenceError("transition network (horizon " + std::to_string(length_) +
                          "): non-finite loss");
  }
  optimizer.step(net_, grads);
  return loss;
}

// ---------------------------------------------------------------------------

OneStepModel::OneStepModel(int state_dim, int action_count, const ModelOptions& options,
                           std::uint64_t seed)
    : net_(state_dim, action_count, 1, options, seed) {}

State OneStepModel::predict(const State& state, int action) const {
  if (probe_ != nullptr) {
    ++probe_->evaluations;
    probe_->inputs.push_back(state);
    probe_->sequence_lengths.push_back(1);
  }
  const int actions[1] = {action};
  return net_.predict(state, actions);
}

MultiStepModel::MultiStepModel(int state_dim, int action_count, int horizon,
                               const ModelOptions& options, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("MultiStepModel: horizon must be >= 1");
  nets_.reserve(static_cast<std::size_t>(horizon));
  for (int l = 1; l <= horizon; ++l) {
    // Horizon 1 shares the one-step model's seed so equal seeds give equal
    // initial weights across the two families.
    const std::uint64_t net_seed = l == 1 ? seed : seed + static_cast<std::uint64_t>(l) * 7919u;
    nets_.emplace_back(state_dim, action_count, l, options, net_seed);
  }
}

TransitionNet& MultiStepModel::network(int length) {
  if (length < 1 || length > horizon()) throw std::out_of_range("MultiStepModel: bad length");
  return nets_[static_cast<std::size_t>(length - 1)];
}

const TransitionNet& MultiStepModel::network(int length) const {
  if (length < 1 || length > horizon()) throw std::out_of_range("MultiStepModel: bad length");
  return nets_[static_cast<std::size_t>(length - 1)];
}

State MultiStepModel::predict(const State& state, std::span<const int> actions) const {
  const int l = static_cast<int>(actions.size());
  if (l < 1 || l > horizon()) {
    throw std::out_of_range("MultiStepModel::predict: sequence length " + std::to_string(l) +
                            " outside [1, " + std::to_string(horizon()) + "]");
  }
  if (probe_ != nullptr) {
    ++probe_->evaluations;
    probe_->inputs.push_back(state);
    probe_->sequence_lengths.push_back(actions.size());
  }
  return nets_[static_cast<std::size_t>(l - 1)].predict(state, actions);
}

// ---------------------------------------------------------------------------

RewardModel::RewardModel(int state_dim, int action_count, int hidden_units, std::uint64_t seed,
                         nn::HiddenActivation activation, int hidden_layers)
    : state_dim_(state_dim),
      action_count_(action_count),
      net_(layer_layout(2 * state_dim + action_count, hidden_units, hidden_layers, 1),
           {activation, nn::OutputActivation::identity}, seed) {}

Eigen::VectorXd RewardModel::encode(const State& state, int action, const State& next) const {
  if (state.size() != state_dim_ || next.size() != state_dim_) {
    throw std::invalid_argument("RewardModel: state size mismatch");
  }
  if (action < 0 || action >= action_count_) throw std::out_of_range("RewardModel: bad action");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(net_.input_size());
  x.head(state_dim_) = state;
  x[state_dim_ + action] = 1.0;
  x.tail(state_dim_) = next;
  return x;
}

double RewardModel::predict(const State& state, int action, const State& next_state) const {
  return net_.forward(encode(state, action, next_state))[0];
}

double RewardModel::train_batch(const MultiStepBatch& batch, nn::Optimizer& optimizer) {
  if (batch.horizon != 1) throw std::invalid_argument("RewardModel: needs horizon-1 tuples");
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd inputs = Eigen::MatrixXd::Zero(net_.input_size(), n);
  Eigen::MatrixXd targets(1, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto i = static_cast<std::size_t>(c);
    inputs.col(c).head(state_dim_) = batch.start_states.col(c);
    inputs(state_dim_ + batch.actions[i][0], c) = 1.0;
    inputs.col(c).tail(state_dim_) = batch.end_states.col(c);
    targets(0, c) = batch.first_rewards[i];
  }
  double loss = 0.0;
  const nn::Gradients grads = net_.forward_backward(inputs, [&](const Eigen::MatrixXd& out) {
    auto lg = nn::mse_loss_grad_batch(out, targets);
    loss = lg.loss;
    return lg.grad;
  });
  if (!std::isfinite(loss)) throw DivergenceError("reward model: non-finite loss");
  optimizer.step(net_, grads);
  return loss;
}

}  // namespace mstep::models

#pragma once

#include "mstep/models/predictors.hpp"
#include "mstep/models/replay_buffer.hpp"
#include "mstep/nn/mlp.hpp"
#include "mstep/nn/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mstep::models {

enum class PredictionTarget { absolute, delta };

struct ModelOptions {
  int hidden_layers = 1;
  int hidden_units = 64;
  PredictionTarget target = PredictionTarget::absolute;
  bool normalize_inputs = false;
  nn::HiddenActivation activation = nn::HiddenActivation::tanh;
};

/// Running per-dimension mean / variance (Welford), used to standardize the
/// state part of model inputs when enabled.
class StateNormalizer {
public:
  explicit StateNormalizer(int dim = 0);

  void observe(const State& s);
  void observe(const Episode& episode);
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& s) const;

  long count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  Eigen::VectorXd stddev() const;

private:
  long count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

/// [s ++ one_hot(a_0) ++ ... ++ one_hot(a_{l-1})]
Eigen::VectorXd encode_state_actions(const Eigen::Ref<const Eigen::VectorXd>& state,
                                     std::span<const int> actions, int action_count);

/// in, hidden x `hidden_layers`, out
std::vector<int> layer_layout(int input, int hidden_units, int hidden_layers, int output);

/// Records every call to a model's predict() for structural checks.
struct PredictionProbe {
  std::size_t evaluations = 0;
  std::vector<State> inputs;
  std::vector<std::size_t> sequence_lengths;
};

/// One network predicting the state `length` steps after its input state
/// given the intervening actions. Building block of both model families.
class TransitionNet {
public:
  TransitionNet(int state_dim, int action_count, int length, const ModelOptions& options,
                std::uint64_t seed);

  int state_dim() const { return state_dim_; }
  int action_count() const { return action_count_; }
  int length() const { return length_; }
  const ModelOptions& options() const { return options_; }

  State predict(const State& state, std::span<const int> actions) const;

  Eigen::MatrixXd encode_batch(const Eigen::Ref<const Eigen::MatrixXd>& states,
                               const std::vector<std::vector<int>>& actions) const;
  Eigen::MatrixXd predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& states,
                                const std::vector<std::vector<int>>& actions) const;

  /// One minibatch MSE step towards `end_states`. Returns the pre-update loss.
  double train_batch(const MultiStepBatch& batch, nn::Optimizer& optimizer);

  nn::Mlp& net() { return net_; }
  const nn::Mlp& net() const { return net_; }
  StateNormalizer& normalizer() { return normalizer_; }
  const StateNormalizer& normalizer() const { return normalizer_; }

private:
  int state_dim_;
  int action_count_;
  int length_;
  ModelOptions options_;
  nn::Mlp net_;
  StateNormalizer normalizer_;
};

/// T^1 learned from (s, a, s') tuples; rollouts chain it on its own output.
class OneStepModel final : public OneStepPredictor {
public:
  OneStepModel(int state_dim, int action_count, const ModelOptions& options, std::uint64_t seed);

  State predict(const State& state, int action) const override;

  TransitionNet& network() { return net_; }
  const TransitionNet& network() const { return net_; }
  void set_probe(PredictionProbe* probe) { probe_ = probe; }

private:
  TransitionNet net_;
  PredictionProbe* probe_ = nullptr;
};

/// T^1 .. T^n with separate parameters per horizon. predict() evaluates
/// exactly one network, rooted at the given state.
class MultiStepModel final : public MultiStepPredictor {
public:
  MultiStepModel(int state_dim, int action_count, int horizon, const ModelOptions& options,
                 std::uint64_t seed);

  int horizon() const override { return static_cast<int>(nets_.size()); }
  State predict(const State& state, std::span<const int> actions) const override;

  TransitionNet& network(int length);
  const TransitionNet& network(int length) const;
  void set_probe(PredictionProbe* probe) { probe_ = probe; }

private:
  std::vector<TransitionNet> nets_;
  PredictionProbe* probe_ = nullptr;
};

/// R(s, a, s') regressed on logged rewards.
class RewardModel final : public RewardPredictor {
public:
  RewardModel(int state_dim, int action_count, int hidden_units, std::uint64_t seed,
              nn::HiddenActivation activation = nn::HiddenActivation::tanh,
              int hidden_layers = 1);

  double predict(const State& state, int action, const State& next_state) const override;
  double train_batch(const MultiStepBatch& batch, nn::Optimizer& optimizer);

  nn::Mlp& net() { return net_; }
  const nn::Mlp& net() const { return net_; }

private:
  Eigen::VectorXd encode(const State& state, int action, const State& next_state) const;

  int state_dim_;
  int action_count_;
  nn::Mlp net_;
};

}  // namespace mstep::models

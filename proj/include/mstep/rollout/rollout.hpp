#pragma once

#include "mstep/core/policy.hpp"
#include "mstep/models/predictors.hpp"

#include <optional>
#include <vector>

namespace mstep::rollout {

/// Which power of gamma multiplies the bootstrap value after n imagined
/// steps: `paper` uses gamma^(n-1), `standard` the n-step-return gamma^n.
enum class BootstrapExponent { paper, standard };

struct RolloutConfig {
  int horizon = 1;
  int samples = 1;
  double gamma = 0.9999;
  BootstrapExponent bootstrap = BootstrapExponent::paper;

  void validate() const;
};

/// s_0..s_n, a_0..a_n, r_0..r_{n-1}. `rewards` is empty when the rollout ran
/// without a reward model.
struct ImaginedTrajectory {
  std::vector<State> states;
  std::vector<int> actions;
  std::vector<double> rewards;
};

/// Chains the one-step model on its own predictions:
/// s_{i+1} = T^1(s_i, a_i), a_i ~ pi(. | s_i). When `first_action` is set,
/// a_0 is taken from it instead of the policy.
ImaginedTrajectory rollout_one_step(const models::OneStepPredictor& model, const Policy& policy,
                                    const State& s0, int n, Rng& rng,
                                    const models::RewardPredictor* reward = nullptr,
                                    std::optional<int> first_action = std::nullopt);

/// Every prediction is rooted at s0: s_i = T^i(s0, a_0..a_{i-1}),
/// a_i ~ pi(. | s_i). No predicted state is ever fed to a transition network.
ImaginedTrajectory rollout_multi_step(const models::MultiStepPredictor& model,
                                      const Policy& policy, const State& s0, int n, Rng& rng,
                                      const models::RewardPredictor* reward = nullptr,
                                      std::optional<int> first_action = std::nullopt);

/// Discounted imagined rewards plus the discounted bootstrap
/// Q(s_n, a_n), per `config.bootstrap`.
double trajectory_return(const ImaginedTrajectory& trajectory, const ActionValueFunction& critic,
                         const RolloutConfig& config);

struct TargetEstimate {
  double value = 0.0;      // mean of the K sample returns
  double std_error = 0.0;  // sample standard deviation / sqrt(K); 0 when K == 1
  /// Seed of the independent stream each sample consumed, in sample order.
  std::vector<std::uint64_t> sample_seeds;
};

/// Monte-Carlo target G(s0, a0) from K imagined multi-step trajectories.
TargetEstimate estimate_target(const State& s0, int a0, const Policy& policy,
                               const ActionValueFunction& critic,
                               const models::RewardPredictor& reward,
                               const models::MultiStepPredictor& model,
                               const RolloutConfig& config, Rng& rng);

/// Same estimator with trajectories from a chained one-step model.
TargetEstimate one_step_model_target(const State& s0, int a0, const Policy& policy,
                                     const ActionValueFunction& critic,
                                     const models::RewardPredictor& reward,
                                     const models::OneStepPredictor& model,
                                     const RolloutConfig& config, Rng& rng);

/// r + gamma * Q(s', a') with a' ~ pi(. | s'); r alone for a terminal
/// transition.
double td0_target(const Transition& transition, const ActionValueFunction& critic,
                  const Policy& policy, double gamma, Rng& rng);

}  // namespace mstep::rollout

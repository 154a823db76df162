#include "mstep/rollout/rollout.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mstep::rollout {

void RolloutConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("rollout horizon must be >= 1");
  if (samples < 1) throw std::invalid_argument("rollout sample count must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

namespace {

void check_finite(const State& s, int step) {
  if (!s.allFinite()) {
    throw DivergenceError("imagined rollout diverged at step " + std::to_string(step));
  }
}

template <typename Predict>
ImaginedTrajectory run_rollout(Predict&& predict_next, const Policy& policy, const State& s0,
                               int n, Rng& rng, const models::RewardPredictor* reward,
                               std::optional<int> first_action) {
  if (n < 1) throw std::invalid_argument("rollout length must be >= 1");
  ImaginedTrajectory traj;
  traj.states.reserve(static_cast<std::size_t>(n) + 1);
  traj.actions.reserve(static_cast<std::size_t>(n) + 1);
  traj.states.push_back(s0);
  traj.actions.push_back(first_action ? *first_action : policy.sample(s0, rng));
  for (int i = 0; i < n; ++i) {
    State next = predict_next(traj, i);
    check_finite(next, i + 1);
    if (reward != nullptr) {
      traj.rewards.push_back(reward->predict(traj.states.back(), traj.actions.back(), next));
    }
    traj.actions.push_back(policy.sample(next, rng));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

template <typename Rollout>
TargetEstimate monte_carlo(Rollout&& rollout_once, const ActionValueFunction& critic,
                           const RolloutConfig& config, Rng& rng) {
  config.validate();
  TargetEstimate est;
  est.sample_seeds.reserve(static_cast<std::size_t>(config.samples));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < config.samples; ++k) {
    const std::uint64_t seed = substream_seed(rng);
    est.sample_seeds.push_back(seed);
    Rng stream(seed);
    const double g = trajectory_return(rollout_once(stream), critic, config);
    sum += g;
    sum_sq += g * g;
  }
  const double k = static_cast<double>(config.samples);
  est.value = sum / k;
  if (config.samples > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / k) / (k - 1.0));
    est.std_error = std::sqrt(var / k);
  }
  if (!std::isfinite(est.value)) throw DivergenceError("non-finite Monte-Carlo target");
  return est;
}

}  // namespace

ImaginedTrajectory rollout_one_step(const models::OneStepPredictor& model, const Policy& policy,
                                    const State& s0, int n, Rng& rng,
                                    const models::RewardPredictor* reward,
                                    std::optional<int> first_action) {
  return run_rollout(
      [&](const ImaginedTrajectory& traj, int) {
        return model.predict(traj.states.back(), traj.actions.back());
      },
      policy, s0, n, rng, reward, first_action);
}

ImaginedTrajectory rollout_multi_step(const models::MultiStepPredictor& model,
                                      const Policy& policy, const State& s0, int n, Rng& rng,
                                      const models::RewardPredictor* reward,
                                      std::optional<int> first_action) {
  if (n > model.horizon()) {
    throw std::invalid_argument("rollout length " + std::to_string(n) +
                                " exceeds model horizon " + std::to_string(model.horizon()));
  }
  return run_rollout(
      [&](const ImaginedTrajectory& traj, int i) {
        const std::span<const int> prefix(traj.actions.data(), static_cast<std::size_t>(i) + 1);
        return model.predict(s0, prefix);
      },
      policy, s0, n, rng, reward, first_action);
}

double trajectory_return(const ImaginedTrajectory& traj, const ActionValueFunction& critic,
                         const RolloutConfig& config) {
  const std::size_t n = traj.rewards.size();
  if (n == 0 || traj.states.size() != n + 1 || traj.actions.size() != n + 1) {
    throw std::invalid_argument("trajectory_return: inconsistent trajectory");
  }
  double g = 0.0;
  double discount = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) discount *= config.gamma;
    g += discount * traj.rewards[i];
  }
  // discount == gamma^(n-1) here
  if (config.bootstrap == BootstrapExponent::standard) discount *= config.gamma;
  return g + discount * critic.value(traj.states.back(), traj.actions.back());
}

TargetEstimate estimate_target(const State& s0, int a0, const Policy& policy,
                               const ActionValueFunction& critic,
                               const models::RewardPredictor& reward,
                               const models::MultiStepPredictor& model,
                               const RolloutConfig& config, Rng& rng) {
  config.validate();
  if (config.horizon > model.horizon()) {
    throw std::invalid_argument("estimate_target: horizon exceeds the multi-step model's");
  }
  return monte_carlo(
      [&](Rng& stream) {
        return rollout_multi_step(model, policy, s0, config.horizon, stream, &reward, a0);
      },
      critic, config, rng);
}

TargetEstimate one_step_model_target(const State& s0, int a0, const Policy& policy,
                                     const ActionValueFunction& critic,
                                     const models::RewardPredictor& reward,
                                     const models::OneStepPredictor& model,
                                     const RolloutConfig& config, Rng& rng) {
  return monte_carlo(
      [&](Rng& stream) {
        return rollout_one_step(model, policy, s0, config.horizon, stream, &reward, a0);
      },
      critic, config, rng);
}

double td0_target(const Transition& transition, const ActionValueFunction& critic,
                  const Policy& policy, double gamma, Rng& rng) {
  if (transition.terminal) return transition.reward;
  Rng stream = substream(rng);
  const int next_action = policy.sample(transition.next_state, stream);
  return transition.reward + gamma * critic.value(transition.next_state, next_action);
}

}  // namespace mstep::rollout

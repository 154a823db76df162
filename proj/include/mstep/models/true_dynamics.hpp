#pragma once

#include "mstep/envs/environment.hpp"
#include "mstep/models/predictors.hpp"

namespace mstep::models {

// Predictors backed by an environment's exact dynamics. They never terminate;
// a rollout simply keeps integrating past the task's failure region, the same
// way a learned model would.

class EnvOneStep final : public OneStepPredictor {
public:
  explicit EnvOneStep(const envs::Environment& env) : env_(env) {}
  State predict(const State& state, int action) const override;

private:
  const envs::Environment& env_;
};

class EnvMultiStep final : public MultiStepPredictor {
public:
  EnvMultiStep(const envs::Environment& env, int horizon);
  int horizon() const override { return horizon_; }
  State predict(const State& state, std::span<const int> actions) const override;

private:
  const envs::Environment& env_;
  int horizon_;
};

class EnvReward final : public RewardPredictor {
public:
  explicit EnvReward(const envs::Environment& env) : env_(env) {}
  double predict(const State& state, int action, const State& next_state) const override;

private:
  const envs::Environment& env_;
};

}  // namespace mstep::models

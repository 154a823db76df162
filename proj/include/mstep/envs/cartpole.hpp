#pragma once

#include "mstep/envs/environment.hpp"

namespace mstep::envs {

/// Cart Pole balancing. Observation (x, x_dot, theta, theta_dot); action 0
/// pushes left, 1 pushes right. Reward +1 for every step, including the one
/// that ends the episode.
class CartPole final : public Environment {
public:
  explicit CartPole(int max_episode_steps = 0);

  EnvSpec spec() const override;
  State reset(Rng& rng) const override;
  StepResult step(const State& state, int action) const override;

private:
  int max_episode_steps_;
};

}  // namespace mstep::envs

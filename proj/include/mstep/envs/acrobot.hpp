#pragma once

#include "mstep/envs/environment.hpp"

#include <array>

namespace mstep::envs {

/// Two-link underactuated arm. The observation is
/// (cos t1, sin t1, cos t2, sin t2, dt1, dt2); actions map to torques
/// {-1, 0, +1} on the second joint. Reward -1 per step until the tip swings
/// above the bar, 0 on the goal step.
class Acrobot final : public Environment {
public:
  /// Underlying integration state (t1, t2, dt1, dt2).
  using Joints = std::array<double, 4>;

  explicit Acrobot(int max_episode_steps = 0);

  EnvSpec spec() const override;
  State reset(Rng& rng) const override;
  StepResult step(const State& state, int action) const override;

  static State observe(const Joints& joints);
  static Joints joints_from(const State& observation);
  static bool is_goal(const Joints& joints);

private:
  int max_episode_steps_;
};

}  // namespace mstep::envs

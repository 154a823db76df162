#pragma once

#include "mstep/core/types.hpp"

#include <memory>
#include <string>

namespace mstep::envs {

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_count = 0;
  int max_episode_steps = 0;
};

struct StepResult {
  State next_state;
  double reward = 0.0;
  bool done = false;
};

/// Episodic control task with continuous observations and discrete actions.
///
/// Dynamics are a pure function of (state, action); the step cap in
/// `EnvSpec::max_episode_steps` is enforced by whoever runs the episode, and
/// `StepResult::done` reports only the task's own termination condition.
class Environment {
public:
  virtual ~Environment() = default;

  virtual EnvSpec spec() const = 0;
  virtual State reset(Rng& rng) const = 0;
  virtual StepResult step(const State& state, int action) const = 0;
};

std::unique_ptr<Environment> make_environment(const std::string& name, int max_episode_steps = 0);

}  // namespace mstep::envs

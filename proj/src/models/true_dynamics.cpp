#include "mstep/models/true_dynamics.hpp"

#include <stdexcept>

namespace mstep::models {

State EnvOneStep::predict(const State& state, int action) const {
  return env_.step(state, action).next_state;
}

EnvMultiStep::EnvMultiStep(const envs::Environment& env, int horizon)
    : env_(env), horizon_(horizon) {
  if (horizon < 1) throw std::invalid_argument("EnvMultiStep: horizon must be >= 1");
}

State EnvMultiStep::predict(const State& state, std::span<const int> actions) const {
  if (actions.empty() || static_cast<int>(actions.size()) > horizon_) {
    throw std::out_of_range("EnvMultiStep: sequence length outside [1, horizon]");
  }
  State s = state;
  for (int a : actions) s = env_.step(s, a).next_state;
  return s;
}

double EnvReward::predict(const State& state, int action, const State&) const {
  return env_.step(state, action).reward;
}

}  // namespace mstep::models

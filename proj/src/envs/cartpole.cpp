#include "mstep/envs/cartpole.hpp"

#include "mstep/envs/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace mstep::envs {

namespace c = cartpole_constants;

CartPole::CartPole(int max_episode_steps)
    : max_episode_steps_(max_episode_steps > 0 ? max_episode_steps
                                               : c::default_max_episode_steps) {}

EnvSpec CartPole::spec() const {
  return {"cartpole", 4, 2, max_episode_steps_};
}

State CartPole::reset(Rng& rng) const {
  std::uniform_real_distribution<double> dist(-c::reset_bound, c::reset_bound);
  State s(4);
  for (int i = 0; i < 4; ++i) s[i] = dist(rng);
  return s;
}

StepResult CartPole::step(const State& state, int action) const {
  if (action < 0 || action >= 2) throw std::out_of_range("CartPole::step: action out of range");
  if (state.size() != 4) throw std::invalid_argument("CartPole::step: state must have 4 entries");

  const double x = state[0];
  const double x_dot = state[1];
  const double theta = state[2];
  const double theta_dot = state[3];

  const double force = action == 1 ? c::force_mag : -c::force_mag;
  const double costheta = std::cos(theta);
  const double sintheta = std::sin(theta);
  const double temp =
      (force + c::polemass_length * theta_dot * theta_dot * sintheta) / c::total_mass;
  const double thetaacc =
      (c::gravity * sintheta - costheta * temp) /
      (c::length * (4.0 / 3.0 - c::masspole * costheta * costheta / c::total_mass));
  const double xacc = temp - c::polemass_length * thetaacc * costheta / c::total_mass;

  State next(4);
  next[0] = x + c::tau * x_dot;
  next[1] = x_dot + c::tau * xacc;
  next[2] = theta + c::tau * theta_dot;
  next[3] = theta_dot + c::tau * thetaacc;

  const bool done = next[0] < -c::x_threshold || next[0] > c::x_threshold ||
                    next[2] < -c::theta_threshold_radians || next[2] > c::theta_threshold_radians;
  return {std::move(next), 1.0, done};
}

}  // namespace mstep::envs

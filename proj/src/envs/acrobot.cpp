#include "mstep/envs/acrobot.hpp"

#include "mstep/envs/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mstep::envs {

namespace c = acrobot_constants;

namespace {

using Augmented = std::array<double, 5>;  // joints followed by the applied torque

// Equations of motion ("book" variant of the reference implementation).
Augmented dsdt(const Augmented& s) {
  constexpr double m1 = c::link_mass_1;
  constexpr double m2 = c::link_mass_2;
  constexpr double l1 = c::link_length_1;
  constexpr double lc1 = c::link_com_pos_1;
  constexpr double lc2 = c::link_com_pos_2;
  constexpr double i1 = c::link_moi;
  constexpr double i2 = c::link_moi;
  constexpr double g = c::gravity;
  constexpr double pi = std::numbers::pi;

  const double a = s[4];
  const double theta1 = s[0];
  const double theta2 = s[1];
  const double dtheta1 = s[2];
  const double dtheta2 = s[3];

  const double d1 =
      m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - pi / 2.0);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - pi / 2.0) + phi2;
  const double ddtheta2 =
      (a + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0};
}

Augmented axpy(const Augmented& y, double h, const Augmented& k) {
  Augmented out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

// Single classical RK4 step over [0, dt].
Augmented rk4(const Augmented& y0, double dt) {
  const double dt2 = dt / 2.0;
  const Augmented k1 = dsdt(y0);
  const Augmented k2 = dsdt(axpy(y0, dt2, k1));
  const Augmented k3 = dsdt(axpy(y0, dt2, k2));
  const Augmented k4 = dsdt(axpy(y0, dt, k3));
  Augmented out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

double wrap(double x, double lo, double hi) {
  const double diff = hi - lo;
  while (x > hi) x -= diff;
  while (x < lo) x += diff;
  return x;
}

}  // namespace

Acrobot::Acrobot(int max_episode_steps)
    : max_episode_steps_(max_episode_steps > 0 ? max_episode_steps
                                               : c::default_max_episode_steps) {}

EnvSpec Acrobot::spec() const {
  return {"acrobot", 6, 3, max_episode_steps_};
}

State Acrobot::observe(const Joints& j) {
  State s(6);
  s << std::cos(j[0]), std::sin(j[0]), std::cos(j[1]), std::sin(j[1]), j[2], j[3];
  return s;
}

Acrobot::Joints Acrobot::joints_from(const State& obs) {
  if (obs.size() != 6) throw std::invalid_argument("Acrobot: observation must have 6 entries");
  return {std::atan2(obs[1], obs[0]), std::atan2(obs[3], obs[2]), obs[4], obs[5]};
}

bool Acrobot::is_goal(const Joints& j) {
  return -std::cos(j[0]) - std::cos(j[1] + j[0]) > 1.0;
}

State Acrobot::reset(Rng& rng) const {
  std::uniform_real_distribution<double> dist(-c::reset_bound, c::reset_bound);
  Joints j{};
  for (double& v : j) v = dist(rng);
  return observe(j);
}

StepResult Acrobot::step(const State& state, int action) const {
  if (action < 0 || action >= 3) throw std::out_of_range("Acrobot::step: action out of range");
  const Joints j = joints_from(state);
  const Augmented augmented{j[0], j[1], j[2], j[3], c::available_torque[action]};
  const Augmented ns = rk4(augmented, c::dt);

  const double pi = std::numbers::pi;
  Joints next{wrap(ns[0], -pi, pi), wrap(ns[1], -pi, pi),
              std::clamp(ns[2], -c::max_vel_1, c::max_vel_1),
              std::clamp(ns[3], -c::max_vel_2, c::max_vel_2)};
  const bool done = is_goal(next);
  return {observe(next), done ? 0.0 : -1.0, done};
}

}  // namespace mstep::envs

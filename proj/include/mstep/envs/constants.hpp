#pragma once

#include <numbers>

// Dynamics constants transcribed from the OpenAI Gym classic-control
// implementations (gym/envs/classic_control/cartpole.py and acrobot.py,
// gym 0.10-era, which is what the public baselines of that time ran).

namespace mstep::envs::cartpole_constants {

inline constexpr double gravity = 9.8;
inline constexpr double masscart = 1.0;
inline constexpr double masspole = 0.1;
inline constexpr double total_mass = masspole + masscart;
inline constexpr double length = 0.5;  // half the pole's length
inline constexpr double polemass_length = masspole * length;
inline constexpr double force_mag = 10.0;
inline constexpr double tau = 0.02;  // seconds between state updates (explicit Euler)
inline constexpr double theta_threshold_radians = 12.0 * 2.0 * std::numbers::pi / 360.0;
inline constexpr double x_threshold = 2.4;
inline constexpr double reset_bound = 0.05;
// CartPole-v0 registration; v1 uses 500.
inline constexpr int default_max_episode_steps = 200;

}  // namespace mstep::envs::cartpole_constants

namespace mstep::envs::acrobot_constants {

inline constexpr double dt = 0.2;
inline constexpr double link_length_1 = 1.0;
inline constexpr double link_length_2 = 1.0;
inline constexpr double link_mass_1 = 1.0;
inline constexpr double link_mass_2 = 1.0;
inline constexpr double link_com_pos_1 = 0.5;
inline constexpr double link_com_pos_2 = 0.5;
inline constexpr double link_moi = 1.0;  // moment of inertia of both links
inline constexpr double max_vel_1 = 4.0 * std::numbers::pi;
inline constexpr double max_vel_2 = 9.0 * std::numbers::pi;
inline constexpr double gravity = 9.8;
inline constexpr double available_torque[3] = {-1.0, 0.0, 1.0};
inline constexpr double reset_bound = 0.1;
// Acrobot-v1 registration.
inline constexpr int default_max_episode_steps = 500;

}  // namespace mstep::envs::acrobot_constants

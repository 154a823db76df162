#include "reference_dynamics.hpp"

#include "mstep/agent/trainer.hpp"
#include "mstep/envs/acrobot.hpp"
#include "mstep/envs/cartpole.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mstep;
namespace ref = mstep::oracle::reference;

TEST(CartPole, MatchesReferenceOnRandomProbes) {
  const envs::CartPole env;
  Rng rng(17);
  std::uniform_real_distribution<double> pos(-2.4, 2.4), vel(-3.0, 3.0), ang(-0.3, 0.3);
  for (int i = 0; i < 1000; ++i) {
    const std::array<double, 4> s{pos(rng), vel(rng), ang(rng), vel(rng)};
    const int a = i % 2;
    const auto expected = ref::cartpole_step(s, a);
    const auto got = env.step(Eigen::Vector4d(s[0], s[1], s[2], s[3]), a);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(got.next_state[k], expected.state[k], 1e-12);
    EXPECT_EQ(got.done, expected.done);
    EXPECT_EQ(got.reward, 1.0);
  }
}

TEST(CartPole, TerminatesOutsideThresholds) {
  const envs::CartPole env;
  EXPECT_TRUE(env.step(Eigen::Vector4d(2.4, 1.0, 0.0, 0.0), 1).done);
  EXPECT_TRUE(env.step(Eigen::Vector4d(0.0, 0.0, 0.21, 0.0), 1).done);
  EXPECT_FALSE(env.step(Eigen::Vector4d(0.0, 0.0, 0.0, 0.0), 1).done);
}

TEST(CartPole, ResetWithinBounds) {
  const envs::CartPole env;
  Rng rng(2);
  for (int i = 0; i < 100; ++i) EXPECT_LE(env.reset(rng).cwiseAbs().maxCoeff(), 0.05);
}

TEST(CartPole, RejectsBadAction) {
  const envs::CartPole env;
  EXPECT_THROW(env.step(Eigen::Vector4d::Zero(), 2), std::out_of_range);
}

TEST(Acrobot, MatchesReferenceOnRandomProbes) {
  const envs::Acrobot env;
  Rng rng(23);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> v1(-4 * std::numbers::pi, 4 * std::numbers::pi);
  std::uniform_real_distribution<double> v2(-9 * std::numbers::pi, 9 * std::numbers::pi);
  for (int i = 0; i < 1000; ++i) {
    const std::array<double, 4> s{angle(rng), angle(rng), v1(rng), v2(rng)};
    const int a = i % 3;
    const auto expected = ref::acrobot_step(s, a);
    const auto got = env.step(envs::Acrobot::observe(s), a);
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(got.next_state[k], expected.observation[k], 1e-12);
    EXPECT_EQ(got.done, expected.terminal);
    EXPECT_EQ(got.reward, expected.reward);
  }
}

TEST(Acrobot, HangingEquilibriumIsAFixedPoint) {
  const envs::Acrobot env;
  State s = envs::Acrobot::observe({0.0, 0.0, 0.0, 0.0});
  const State start = s;
  for (int t = 0; t < 100; ++t) s = env.step(s, 1).next_state;  // zero torque
  EXPECT_LT((s - start).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Acrobot, ObservationRoundTrip) {
  const envs::Acrobot::Joints j{0.3, -2.9, 1.5, -7.0};
  const auto back = envs::Acrobot::joints_from(envs::Acrobot::observe(j));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(back[k], j[k], 1e-15);
}

TEST(Acrobot, VelocitiesAreClamped) {
  const envs::Acrobot env;
  Rng rng(4);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const State s = envs::Acrobot::observe({angle(rng), angle(rng), 12.5, 28.2});
    const State n = env.step(s, 2).next_state;
    EXPECT_LE(std::abs(n[4]), 4 * std::numbers::pi);
    EXPECT_LE(std::abs(n[5]), 9 * std::numbers::pi);
  }
}

TEST(Environment, RegistryAndCaps) {
  EXPECT_EQ(envs::make_environment("cartpole")->spec().max_episode_steps, 200);
  EXPECT_EQ(envs::make_environment("acrobot")->spec().max_episode_steps, 500);
  EXPECT_EQ(envs::make_environment("cartpole", 50)->spec().max_episode_steps, 50);
  EXPECT_THROW(envs::make_environment("pendulum"), std::invalid_argument);
}

TEST(Environment, RunEpisodeTruncatesAtCap) {
  const auto env = envs::make_environment("acrobot", 30);
  const agent::Actor actor(6, 3, {}, {}, 1);
  Rng rng(0);
  const Episode ep = agent::run_episode(*env, actor, rng);
  EXPECT_EQ(ep.length(), 30u);
  EXPECT_TRUE(ep.truncated);
  EXPECT_FALSE(ep.terminated);
  EXPECT_FALSE(ep.transition(29).terminal);
  EXPECT_EQ(ep.states.size(), 31u);
}

TEST(Environment, CartPoleEpisodeEndsOnFailure) {
  const auto env = envs::make_environment("cartpole");
  const agent::Actor actor(4, 2, {}, {}, 1);
  Rng rng(0);
  const Episode ep = agent::run_episode(*env, actor, rng);
  ASSERT_TRUE(ep.terminated);
  EXPECT_TRUE(ep.transition(ep.length() - 1).terminal);
  EXPECT_DOUBLE_EQ(ep.total_return(), static_cast<double>(ep.length()));
}

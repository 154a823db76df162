#include "mstep/models/replay_buffer.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <map>

using namespace mstep;

namespace {

// States are (episode tag, t) so every sampled tuple can be traced.
Episode tagged_episode(int tag, int length) {
  Episode e;
  for (int t = 0; t <= length; ++t) e.states.push_back(Eigen::Vector2d(tag, t));
  for (int t = 0; t < length; ++t) {
    e.actions.push_back(t % 2);
    e.rewards.push_back(tag * 100.0 + t);
  }
  e.terminated = true;
  return e;
}

}  // namespace

TEST(ReplayBuffer, EvictsWholeEpisodesFifo) {
  models::ReplayBuffer buffer(10);
  buffer.add_episode(tagged_episode(0, 4));
  buffer.add_episode(tagged_episode(1, 4));
  EXPECT_EQ(buffer.transition_count(), 8u);
  buffer.add_episode(tagged_episode(2, 3));
  EXPECT_EQ(buffer.episode_count(), 2u);
  EXPECT_EQ(buffer.transition_count(), 7u);
  EXPECT_EQ(buffer.first_episode_id(), 1u);
  EXPECT_EQ(buffer.episode_by_id(2).states.front()[0], 2.0);
  EXPECT_THROW(buffer.episode_by_id(0), std::out_of_range);
}

TEST(ReplayBuffer, RejectsEmptyMalformedAndOversizedEpisodes) {
  models::ReplayBuffer buffer(5);
  EXPECT_THROW(buffer.add_episode(Episode{}), std::invalid_argument);
  Episode bad = tagged_episode(0, 3);
  bad.states.pop_back();
  EXPECT_THROW(buffer.add_episode(bad), std::invalid_argument);
  EXPECT_THROW(buffer.add_episode(tagged_episode(0, 6)), std::invalid_argument);
  EXPECT_TRUE(buffer.empty());
}

TEST(ReplayBuffer, ValidStartCount) {
  models::ReplayBuffer buffer(100);
  buffer.add_episode(tagged_episode(0, 5));
  buffer.add_episode(tagged_episode(1, 2));
  EXPECT_EQ(buffer.valid_start_count(1), 7u);
  EXPECT_EQ(buffer.valid_start_count(3), 3u);
  EXPECT_EQ(buffer.valid_start_count(6), 0u);
  Rng rng(0);
  EXPECT_THROW(buffer.sample_multistep_batch(6, 4, rng), std::runtime_error);
}

TEST(ReplayBuffer, TuplesStayInsideOneEpisode) {
  models::ReplayBuffer buffer(100);
  for (int e = 0; e < 5; ++e) buffer.add_episode(tagged_episode(e, 2 + 2 * e));
  Rng rng(8);
  const auto batch = buffer.sample_multistep_batch(3, 500, rng);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto c = static_cast<Eigen::Index>(b);
    const double tag = batch.start_states(0, c);
    const double t = batch.start_states(1, c);
    EXPECT_EQ(batch.end_states(0, c), tag);
    EXPECT_EQ(batch.end_states(1, c), t + 3);
    ASSERT_EQ(batch.actions[b].size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(batch.actions[b][i], (static_cast<int>(t) + i) % 2);
    EXPECT_EQ(batch.first_rewards[b], tag * 100 + t);
    EXPECT_EQ(batch.origins[b].first, static_cast<std::size_t>(tag));
  }
}

TEST(ReplayBuffer, StartsAreUniformOverValidTuples) {
  models::ReplayBuffer buffer(100);
  buffer.add_episode(tagged_episode(0, 3));
  buffer.add_episode(tagged_episode(1, 6));
  buffer.add_episode(tagged_episode(2, 1));  // too short for horizon 2
  Rng rng(12);
  const int n = 60000;
  const auto batch = buffer.sample_multistep_batch(2, static_cast<std::size_t>(n), rng);
  std::map<std::pair<int, int>, int> counts;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto c = static_cast<Eigen::Index>(b);
    ++counts[{static_cast<int>(batch.start_states(0, c)), static_cast<int>(batch.start_states(1, c))}];
  }
  const std::size_t cells = buffer.valid_start_count(2);
  ASSERT_EQ(cells, 7u);
  ASSERT_EQ(counts.size(), cells);
  const double expected = static_cast<double>(n) / static_cast<double>(cells);
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.999));
}

TEST(ReplayBuffer, TransitionsCarryTerminalFlagOnlyAtTheEnd) {
  models::ReplayBuffer buffer(100);
  buffer.add_episode(tagged_episode(0, 4));
  Rng rng(1);
  for (const auto& tr : buffer.sample_transitions(200, rng)) {
    EXPECT_EQ(tr.terminal, tr.state[1] == 3.0);
    EXPECT_EQ(tr.next_state[1], tr.state[1] + 1);
  }
}

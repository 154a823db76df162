#pragma once

#include "mstep/core/types.hpp"

#include <cstddef>
#include <deque>
#include <vector>

namespace mstep::models {

/// (s_t, a_t .. a_{t+l-1}, s_{t+l}) tuples, one per column / row.
struct MultiStepBatch {
  int horizon = 0;
  Eigen::MatrixXd start_states;  // state_dim x B
  std::vector<std::vector<int>> actions;  // B sequences of length `horizon`
  Eigen::MatrixXd end_states;  // state_dim x B
  std::vector<double> first_rewards;  // r_t of each tuple
  /// (buffer-lifetime episode id, start index t) of each tuple.
  std::vector<std::pair<std::size_t, std::size_t>> origins;

  std::size_t size() const { return actions.size(); }
};

/// FIFO store of whole episodes, capped by total transition count.
class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t max_transitions);

  /// Appends and evicts the oldest episodes until within the cap. An empty
  /// episode, or one longer than the cap on its own, is rejected.
  void add_episode(Episode episode);

  std::size_t transition_count() const { return transitions_; }
  std::size_t episode_count() const { return episodes_.size(); }
  std::size_t max_transitions() const { return max_transitions_; }
  bool empty() const { return episodes_.empty(); }

  /// Episodes currently held, oldest first.
  const std::deque<Episode>& episodes() const { return episodes_; }
  /// Buffer-lifetime id of episodes().front().
  std::size_t first_episode_id() const { return first_episode_id_; }
  const Episode& episode_by_id(std::size_t id) const;

  /// Number of start indices t with t + horizon inside the same episode.
  std::size_t valid_start_count(int horizon) const;

  /// Start indices drawn uniformly over all valid (episode, t) pairs.
  /// Throws std::runtime_error when no episode is long enough.
  MultiStepBatch sample_multistep_batch(int horizon, std::size_t batch_size, Rng& rng) const;

  std::vector<Transition> sample_transitions(std::size_t batch_size, Rng& rng) const;

private:
  std::pair<std::size_t, std::size_t> locate(int horizon, std::size_t flat_index) const;

  std::size_t max_transitions_;
  std::size_t transitions_ = 0;
  std::size_t first_episode_id_ = 0;
  std::deque<Episode> episodes_;
};

}  // namespace mstep::models

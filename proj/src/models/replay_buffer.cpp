#include "mstep/models/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mstep::models {

ReplayBuffer::ReplayBuffer(std::size_t max_transitions) : max_transitions_(max_transitions) {
  if (max_transitions == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::add_episode(Episode episode) {
  if (episode.empty()) throw std::invalid_argument("ReplayBuffer: empty episode");
  if (episode.states.size() != episode.length() + 1 ||
      episode.rewards.size() != episode.length()) {
    throw std::invalid_argument("ReplayBuffer: malformed episode");
  }
  if (episode.length() > max_transitions_) {
    throw std::invalid_argument("ReplayBuffer: episode of " + std::to_string(episode.length()) +
                                " transitions exceeds capacity " +
                                std::to_string(max_transitions_));
  }
  transitions_ += episode.length();
  episodes_.push_back(std::move(episode));
  while (transitions_ > max_transitions_) {
    transitions_ -= episodes_.front().length();
    episodes_.pop_front();
    ++first_episode_id_;
  }
}

const Episode& ReplayBuffer::episode_by_id(std::size_t id) const {
  if (id < first_episode_id_ || id - first_episode_id_ >= episodes_.size()) {
    throw std::out_of_range("ReplayBuffer: episode id no longer held");
  }
  return episodes_[id - first_episode_id_];
}

std::size_t ReplayBuffer::valid_start_count(int horizon) const {
  if (horizon < 1) throw std::invalid_argument("ReplayBuffer: horizon must be >= 1");
  std::size_t total = 0;
  const auto l = static_cast<std::size_t>(horizon);
  for (const Episode& e : episodes_) {
    if (e.length() >= l) total += e.length() - l + 1;
  }
  return total;
}

std::pair<std::size_t, std::size_t> ReplayBuffer::locate(int horizon,
                                                         std::size_t flat_index) const {
  const auto l = static_cast<std::size_t>(horizon);
  for (std::size_t i = 0; i < episodes_.size(); ++i) {
    const std::size_t len = episodes_[i].length();
    if (len < l) continue;
    const std::size_t starts = len - l + 1;
    if (flat_index < starts) return {i, flat_index};
    flat_index -= starts;
  }
  throw std::logic_error("ReplayBuffer::locate: index past end");
}

MultiStepBatch ReplayBuffer::sample_multistep_batch(int horizon, std::size_t batch_size,
                                                    Rng& rng) const {
  const std::size_t total = valid_start_count(horizon);
  if (total == 0) {
    throw std::runtime_error("ReplayBuffer: no episode holds " + std::to_string(horizon) +
                             " consecutive transitions");
  }
  if (episodes_.empty()) throw std::runtime_error("ReplayBuffer: empty");
  const auto dim = episodes_.front().states.front().size();

  // Prefix sums so each draw is a binary search rather than a scan.
  const auto l = static_cast<std::size_t>(horizon);
  std::vector<std::size_t> prefix;
  std::vector<std::size_t> owner;
  prefix.reserve(episodes_.size());
  std::size_t running = 0;
  for (std::size_t i = 0; i < episodes_.size(); ++i) {
    const std::size_t len = episodes_[i].length();
    if (len < l) continue;
    running += len - l + 1;
    prefix.push_back(running);
    owner.push_back(i);
  }

  MultiStepBatch batch;
  batch.horizon = horizon;
  batch.start_states.resize(dim, static_cast<Eigen::Index>(batch_size));
  batch.end_states.resize(dim, static_cast<Eigen::Index>(batch_size));
  batch.actions.reserve(batch_size);
  batch.first_rewards.reserve(batch_size);
  batch.origins.reserve(batch_size);

  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::size_t flat = pick(rng);
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), flat);
    const std::size_t slot = static_cast<std::size_t>(it - prefix.begin());
    const std::size_t before = slot == 0 ? 0 : prefix[slot - 1];
    const std::size_t ep = owner[slot];
    const std::size_t t = flat - before;
    const Episode& e = episodes_[ep];

    const auto col = static_cast<Eigen::Index>(b);
    batch.start_states.col(col) = e.states[t];
    batch.end_states.col(col) = e.states[t + l];
    batch.actions.emplace_back(e.actions.begin() + static_cast<std::ptrdiff_t>(t),
                               e.actions.begin() + static_cast<std::ptrdiff_t>(t + l));
    batch.first_rewards.push_back(e.rewards[t]);
    batch.origins.emplace_back(first_episode_id_ + ep, t);
  }
  return batch;
}

std::vector<Transition> ReplayBuffer::sample_transitions(std::size_t batch_size, Rng& rng) const {
  if (transitions_ == 0) throw std::runtime_error("ReplayBuffer: empty");
  std::uniform_int_distribution<std::size_t> pick(0, transitions_ - 1);
  std::vector<Transition> out;
  out.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const auto [ep, t] = locate(1, pick(rng));
    out.push_back(episodes_[ep].transition(t));
  }
  return out;
}

}  // namespace mstep::models

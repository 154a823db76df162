#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mstep {

/// Environment observation. Fixed length per domain.
using State = Eigen::VectorXd;

using Rng = std::mt19937_64;

/// Raised when a numeric quantity leaves the finite range (exploding
/// gradients, model rollouts that wander off to infinity, ...).
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

/// One logged transition (s, a, r, s', terminal). `terminal` is true only
/// when the environment ended the episode; time-limit truncation is not
/// terminal.
struct Transition {
  State state;
  int action = 0;
  double reward = 0.0;
  State next_state;
  bool terminal = false;
};

/// An episode of interaction: states s_0..s_T, actions a_0..a_{T-1},
/// rewards r_0..r_{T-1}.
struct Episode {
  std::vector<State> states;
  std::vector<int> actions;
  std::vector<double> rewards;
  bool terminated = false;
  bool truncated = false;

  std::size_t length() const { return actions.size(); }
  bool empty() const { return actions.empty(); }

  double total_return() const {
    double total = 0.0;
    for (double r : rewards) total += r;
    return total;
  }

  Transition transition(std::size_t t) const {
    return Transition{states.at(t), actions.at(t), rewards.at(t), states.at(t + 1),
                      terminated && t + 1 == length()};
  }
};

}  // namespace mstep

#pragma once

#include "mstep/core/types.hpp"

#include <span>

namespace mstep::models {

/// T^1(s, a): expected next state.
class OneStepPredictor {
public:
  virtual ~OneStepPredictor() = default;
  virtual State predict(const State& state, int action) const = 0;
};

/// T^l(s, a_0 .. a_{l-1}) for 1 <= l <= horizon(): the state l steps after
/// `state`, computed directly from the root state.
class MultiStepPredictor {
public:
  virtual ~MultiStepPredictor() = default;
  virtual int horizon() const = 0;
  virtual State predict(const State& state, std::span<const int> actions) const = 0;
};

/// R(s, a, s').
class RewardPredictor {
public:
  virtual ~RewardPredictor() = default;
  virtual double predict(const State& state, int action, const State& next_state) const = 0;
};

}  // namespace mstep::models

#pragma once

#include "mstep/core/random.hpp"
#include "mstep/core/types.hpp"

namespace mstep {

/// pi(. | s) over a fixed, discrete action set.
class Policy {
public:
  virtual ~Policy() = default;
  virtual int action_count() const = 0;
  virtual Eigen::VectorXd probabilities(const State& state) const = 0;

  int sample(const State& state, Rng& rng) const {
    return sample_categorical(probabilities(state), rng);
  }
};

/// Q(s, a).
class ActionValueFunction {
public:
  virtual ~ActionValueFunction() = default;
  virtual double value(const State& state, int action) const = 0;
};

}  // namespace mstep

#pragma once

#include "mstep/nn/mlp.hpp"

namespace mstep::nn {

enum class OptimizerKind { sgd, adam };

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::adam;
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Gradient-descent state for one network. Adam moments are zero until the
/// first step and stay shape-matched to the network they were built for.
class Optimizer {
public:
  Optimizer(const Mlp& net, OptimizerSettings settings);

  /// Descends along `grads`. Throws DivergenceError on non-finite gradients.
  void step(Mlp& net, const Gradients& grads);

  const OptimizerSettings& settings() const { return settings_; }
  long steps() const { return steps_; }
  const Gradients& first_moment() const { return first_; }
  const Gradients& second_moment() const { return second_; }

private:
  OptimizerSettings settings_;
  long steps_ = 0;
  Gradients first_;
  Gradients second_;
};

}  // namespace mstep::nn

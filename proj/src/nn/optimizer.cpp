#include "mstep/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace mstep::nn {

Optimizer::Optimizer(const Mlp& net, OptimizerSettings settings)
    : settings_(settings), first_(Gradients::zeros_like(net)), second_(Gradients::zeros_like(net)) {
  if (!(settings_.step_size >= 0.0) || !std::isfinite(settings_.step_size)) {
    throw std::invalid_argument("Optimizer: step size must be a finite non-negative number");
  }
  if (settings_.kind == OptimizerKind::adam &&
      !(settings_.beta1 >= 0.0 && settings_.beta1 < 1.0 && settings_.beta2 >= 0.0 &&
        settings_.beta2 < 1.0 && settings_.epsilon > 0.0)) {
    throw std::invalid_argument("Optimizer: invalid Adam hyperparameters");
  }
}

void Optimizer::step(Mlp& net, const Gradients& grads) {
  if (!grads.congruent_with(net) || !first_.congruent_with(net)) {
    throw std::invalid_argument("Optimizer::step: gradient shape does not match network");
  }
  if (!grads.all_finite()) {
    throw DivergenceError("Optimizer::step: non-finite gradient");
  }
  ++steps_;
  const double alpha = settings_.step_size;

  if (settings_.kind == OptimizerKind::sgd) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      net.weights(l) -= alpha * grads.weights[l];
      net.biases(l) -= alpha * grads.biases[l];
    }
    return;
  }

  const double b1 = settings_.beta1;
  const double b2 = settings_.beta2;
  const double eps = settings_.epsilon;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= alpha * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    update(net.weights(l), first_.weights[l], second_.weights[l], grads.weights[l]);
    update(net.biases(l), first_.biases[l], second_.biases[l], grads.biases[l]);
  }
}

}  // namespace mstep::nn

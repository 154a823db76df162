#pragma once

#include "mstep/core/policy.hpp"
#include "mstep/nn/mlp.hpp"
#include "mstep/nn/optimizer.hpp"

#include <vector>

namespace mstep::agent {

class Critic;

struct NetworkShape {
  int hidden_layers = 1;
  int hidden_units = 64;
  nn::HiddenActivation activation = nn::HiddenActivation::tanh;
};

/// Softmax policy network pi(a | s; theta).
class Actor final : public Policy {
public:
  Actor(int state_dim, int action_count, NetworkShape shape, nn::OptimizerSettings optimizer,
        std::uint64_t seed);

  int action_count() const override { return net_.output_size(); }
  Eigen::VectorXd probabilities(const State& state) const override;
  int act(const State& state, Rng& rng) const { return sample(state, rng); }

  /// sum_s sum_a pi(a|s) q(a, s) with states and q-values one per column.
  double objective(const Eigen::Ref<const Eigen::MatrixXd>& states,
                   const Eigen::Ref<const Eigen::MatrixXd>& q_values) const;
  /// Gradient of objective() with q held constant.
  nn::Gradients objective_gradient(const Eigen::Ref<const Eigen::MatrixXd>& states,
                                   const Eigen::Ref<const Eigen::MatrixXd>& q_values) const;

  /// One ascent step on the all-actions objective over the states the episode
  /// acted in, with Q from the critic's online network.
  void update(const Critic& critic, const Episode& episode);
  void update(const Eigen::Ref<const Eigen::MatrixXd>& states,
              const Eigen::Ref<const Eigen::MatrixXd>& q_values);

  nn::Mlp& net() { return net_; }
  const nn::Mlp& net() const { return net_; }
  const nn::Optimizer& optimizer() const { return optimizer_; }

private:
  nn::Mlp net_;
  nn::Optimizer optimizer_;
};

/// Stacks states into a (dim x count) matrix.
Eigen::MatrixXd stack_states(const std::vector<State>& states, std::size_t count);

}  // namespace mstep::agent

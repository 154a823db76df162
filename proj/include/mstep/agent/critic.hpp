#pragma once

#include "mstep/agent/actor.hpp"

namespace mstep::agent {

/// Q(s, .) read from a network with one output per action.
class QNetworkView final : public ActionValueFunction {
public:
  explicit QNetworkView(const nn::Mlp& net) : net_(&net) {}
  double value(const State& state, int action) const override;

private:
  const nn::Mlp* net_;
};

/// Action-value network with a lagged target copy used for bootstrapping.
class Critic {
public:
  Critic(int state_dim, int action_count, NetworkShape shape, nn::OptimizerSettings optimizer,
         std::uint64_t seed);

  int action_count() const { return net_.output_size(); }
  Eigen::VectorXd values(const State& state) const { return net_.forward(state); }
  double value(const State& state, int action) const;

  QNetworkView online() const { return QNetworkView(net_); }
  QNetworkView target() const { return QNetworkView(target_net_); }
  void sync_target() { target_net_ = net_; }

  /// One minibatch step on mean (Q(s_b, a_b) - G_b)^2. Returns the
  /// pre-update loss.
  double regress(const Eigen::Ref<const Eigen::MatrixXd>& states, const std::vector<int>& actions,
                 const std::vector<double>& targets);

  nn::Mlp& net() { return net_; }
  const nn::Mlp& net() const { return net_; }
  const nn::Mlp& target_net() const { return target_net_; }
  const nn::Optimizer& optimizer() const { return optimizer_; }

private:
  nn::Mlp net_;
  nn::Mlp target_net_;
  nn::Optimizer optimizer_;
};

}  // namespace mstep::agent

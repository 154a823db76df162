#include "mstep/agent/critic.hpp"

#include "mstep/models/models.hpp"

#include <cmath>
#include <stdexcept>

namespace mstep::agent {

double QNetworkView::value(const State& state, int action) const {
  if (action < 0 || action >= net_->output_size()) {
    throw std::out_of_range("QNetworkView: action out of range");
  }
  return net_->forward(state)[action];
}

Critic::Critic(int state_dim, int action_count, NetworkShape shape,
               nn::OptimizerSettings optimizer, std::uint64_t seed)
    : net_(models::layer_layout(state_dim, shape.hidden_units, shape.hidden_layers, action_count),
           {shape.activation, nn::OutputActivation::identity}, seed),
      target_net_(net_),
      optimizer_(net_, optimizer) {}

double Critic::value(const State& state, int action) const {
  return online().value(state, action);
}

double Critic::regress(const Eigen::Ref<const Eigen::MatrixXd>& states,
                       const std::vector<int>& actions, const std::vector<double>& targets) {
  const auto n = static_cast<std::size_t>(states.cols());
  if (actions.size() != n || targets.size() != n || n == 0) {
    throw std::invalid_argument("Critic::regress: batch size mismatch");
  }
  double loss = 0.0;
  const nn::Gradients grads = net_.forward_backward(states, [&](const Eigen::MatrixXd& q) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    for (std::size_t b = 0; b < n; ++b) {
      const auto col = static_cast<Eigen::Index>(b);
      const double err = q(actions[b], col) - targets[b];
      loss += err * err;
      g(actions[b], col) = 2.0 * err / static_cast<double>(n);
    }
    loss /= static_cast<double>(n);
    return g;
  });
  if (!std::isfinite(loss)) throw DivergenceError("critic: non-finite loss");
  optimizer_.step(net_, grads);
  return loss;
}

}  // namespace mstep::agent

#include "mstep/agent/actor.hpp"

#include "mstep/agent/critic.hpp"
#include "mstep/models/models.hpp"

#include <stdexcept>

namespace mstep::agent {

Eigen::MatrixXd stack_states(const std::vector<State>& states, std::size_t count) {
  if (count > states.size() || count == 0) throw std::invalid_argument("stack_states: bad count");
  Eigen::MatrixXd out(states.front().size(), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) out.col(static_cast<Eigen::Index>(i)) = states[i];
  return out;
}

Actor::Actor(int state_dim, int action_count, NetworkShape shape,
             nn::OptimizerSettings optimizer, std::uint64_t seed)
    : net_(models::layer_layout(state_dim, shape.hidden_units, shape.hidden_layers, action_count),
           {shape.activation, nn::OutputActivation::softmax}, seed),
      optimizer_(net_, optimizer) {
  if (action_count < 2) throw std::invalid_argument("Actor: need at least two actions");
}

Eigen::VectorXd Actor::probabilities(const State& state) const {
  return net_.forward(state);
}

double Actor::objective(const Eigen::Ref<const Eigen::MatrixXd>& states,
                        const Eigen::Ref<const Eigen::MatrixXd>& q_values) const {
  const Eigen::MatrixXd probs = net_.forward_batch(states);
  if (probs.rows() != q_values.rows() || probs.cols() != q_values.cols()) {
    throw std::invalid_argument("Actor::objective: q-value shape mismatch");
  }
  return probs.cwiseProduct(q_values).sum();
}

nn::Gradients Actor::objective_gradient(const Eigen::Ref<const Eigen::MatrixXd>& states,
                                        const Eigen::Ref<const Eigen::MatrixXd>& q_values) const {
  return net_.backward_batch(states, q_values);
}

void Actor::update(const Eigen::Ref<const Eigen::MatrixXd>& states,
                   const Eigen::Ref<const Eigen::MatrixXd>& q_values) {
  nn::Gradients grads = objective_gradient(states, q_values);
  grads *= -1.0;  // ascent
  optimizer_.step(net_, grads);
}

void Actor::update(const Critic& critic, const Episode& episode) {
  if (episode.empty()) throw std::invalid_argument("Actor::update: empty episode");
  const Eigen::MatrixXd states = stack_states(episode.states, episode.length());
  update(states, critic.net().forward_batch(states));
}

}  // namespace mstep::agent

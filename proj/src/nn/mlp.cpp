#include "mstep/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mstep::nn {

namespace {

void validate_layout(const std::vector<int>& sizes) {
  if (sizes.size() < 2) {
    throw std::invalid_argument("Mlp: need at least an input and an output layer, got " +
                                std::to_string(sizes.size()) + " sizes");
  }
  for (int s : sizes) {
    if (s <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
  }
}

void apply_hidden(HiddenActivation act, Eigen::MatrixXd& z) {
  switch (act) {
    case HiddenActivation::tanh: z = z.array().tanh().matrix(); break;
    case HiddenActivation::relu: z = z.cwiseMax(0.0); break;
  }
}

void apply_softmax_columns(Eigen::MatrixXd& z) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    auto col = z.col(c);
    const double peak = col.maxCoeff();
    col = (col.array() - peak).exp().matrix();
    col /= col.sum();
  }
}

// Backprop through a softmax head: d_i = p_i * sum_j p_j (g_i - g_j). Written
// in difference form so a constant upstream gradient gives exactly zero.
Eigen::MatrixXd softmax_backward(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& grads) {
  Eigen::MatrixXd out(probs.rows(), probs.cols());
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < probs.rows(); ++j) {
        acc += probs(j, c) * (grads(i, c) - grads(j, c));
      }
      out(i, c) = probs(i, c) * acc;
    }
  }
  return out;
}

}  // namespace

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(net.weights(l).rows(), net.weights(l).cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(net.biases(l).size()));
  }
  return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.weights.size() != weights.size()) {
    throw std::invalid_argument("Gradients: layer count mismatch");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

Gradients& Gradients::operator*=(double factor) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= factor;
    biases[l] *= factor;
  }
  return *this;
}

bool Gradients::all_finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

bool Gradients::congruent_with(const Mlp& net) const {
  if (weights.size() != net.layer_count() || biases.size() != net.layer_count()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != net.weights(l).rows() || weights[l].cols() != net.weights(l).cols() ||
        biases[l].size() != net.biases(l).size()) {
      return false;
    }
  }
  return true;
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> out;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index r = 0; r < weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights[l].cols(); ++c) out.push_back(weights[l](r, c));
    }
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) out.push_back(biases[l][i]);
  }
  return out;
}

Mlp::Mlp(std::vector<int> layer_sizes, Activations activations)
    : layer_sizes_(std::move(layer_sizes)), activations_(activations) {
  validate_layout(layer_sizes_);
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    weights_.push_back(Eigen::MatrixXd::Zero(layer_sizes_[l + 1], layer_sizes_[l]));
    biases_.push_back(Eigen::VectorXd::Zero(layer_sizes_[l + 1]));
  }
}

Mlp::Mlp(std::vector<int> layer_sizes, Activations activations, std::uint64_t seed)
    : Mlp(std::move(layer_sizes), activations) {
  Rng rng(seed);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double fan_in = layer_sizes_[l];
    const double fan_out = layer_sizes_[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = dist(rng);
    }
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::Ref<const Eigen::VectorXd>& input) const {
  if (input.size() != input_size()) {
    throw std::invalid_argument("Mlp::forward: expected input of size " +
                                std::to_string(input_size()) + ", got " +
                                std::to_string(input.size()));
  }
  Eigen::VectorXd a = input;
  const std::size_t last = weights_.size() - 1;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    if (l < last) {
      if (activations_.hidden == HiddenActivation::tanh) {
        a = z.array().tanh().matrix();
      } else {
        a = z.cwiseMax(0.0);
      }
    } else {
      a = std::move(z);
    }
  }
  if (activations_.output == OutputActivation::softmax) {
    const double peak = a.maxCoeff();
    a = (a.array() - peak).exp().matrix();
    a /= a.sum();
  }
  return a;
}

void Mlp::forward_cached(const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                         std::vector<Eigen::MatrixXd>& activations) const {
  if (inputs.rows() != input_size()) {
    throw std::invalid_argument("Mlp: expected inputs with " + std::to_string(input_size()) +
                                " rows, got " + std::to_string(inputs.rows()));
  }
  activations.clear();
  activations.reserve(weights_.size() + 1);
  activations.emplace_back(inputs);
  const std::size_t last = weights_.size() - 1;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * activations.back();
    z.colwise() += biases_[l];
    if (l < last) {
      apply_hidden(activations_.hidden, z);
    } else if (activations_.output == OutputActivation::softmax) {
      apply_softmax_columns(z);
    }
    activations.push_back(std::move(z));
  }
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  std::vector<Eigen::MatrixXd> acts;
  forward_cached(inputs, acts);
  return std::move(acts.back());
}

Gradients Mlp::backward(const Eigen::Ref<const Eigen::VectorXd>& input,
                        const Eigen::Ref<const Eigen::VectorXd>& output_grad) const {
  if (input.size() != input_size()) {
    throw std::invalid_argument("Mlp::backward: input size mismatch");
  }
  return backward_batch(Eigen::MatrixXd(input), Eigen::MatrixXd(output_grad));
}

Gradients Mlp::backward_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                              const Eigen::Ref<const Eigen::MatrixXd>& output_grads) const {
  std::vector<Eigen::MatrixXd> acts;
  forward_cached(inputs, acts);
  return backward_cached(acts, output_grads);
}

Gradients Mlp::forward_backward(
    const Eigen::Ref<const Eigen::MatrixXd>& inputs,
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& output_grad_of) const {
  std::vector<Eigen::MatrixXd> acts;
  forward_cached(inputs, acts);
  const Eigen::MatrixXd output_grads = output_grad_of(acts.back());
  return backward_cached(acts, output_grads);
}

Gradients Mlp::backward_cached(const std::vector<Eigen::MatrixXd>& acts,
                               const Eigen::Ref<const Eigen::MatrixXd>& output_grads) const {
  if (output_grads.rows() != output_size() || output_grads.cols() != acts.front().cols()) {
    throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");
  }
  Gradients grads;
  grads.weights.resize(weights_.size());
  grads.biases.resize(weights_.size());

  Eigen::MatrixXd delta = activations_.output == OutputActivation::softmax
                              ? softmax_backward(acts.back(), output_grads)
                              : Eigen::MatrixXd(output_grads);
  for (std::size_t l = weights_.size(); l-- > 0;) {
    grads.weights[l] = delta * acts[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = weights_[l].transpose() * delta;
    const Eigen::MatrixXd& a = acts[l];
    if (activations_.hidden == HiddenActivation::tanh) {
      delta = back.array() * (1.0 - a.array().square());
    } else {
      delta = back.array() * (a.array() > 0.0).cast<double>();
    }
  }
  return grads;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) out.push_back(weights_[l](r, c));
    }
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) out.push_back(biases_[l][i]);
  }
  return out;
}

void Mlp::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw std::invalid_argument("Mlp::set_parameters: expected " +
                                std::to_string(parameter_count()) + " values, got " +
                                std::to_string(values.size()));
  }
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = values[k++];
    }
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l][i] = values[k++];
  }
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.layer_sizes_ != b.layer_sizes_ || a.activations_.hidden != b.activations_.hidden ||
      a.activations_.output != b.activations_.output) {
    return false;
  }
  for (std::size_t l = 0; l < a.weights_.size(); ++l) {
    if (a.weights_[l] != b.weights_[l] || a.biases_[l] != b.biases_[l]) return false;
  }
  return true;
}

Mlp load_mlp_parameters(std::vector<int> layer_sizes, Activations activations,
                        std::span<const double> values) {
  Mlp net(std::move(layer_sizes), activations);
  net.set_parameters(values);
  return net;
}

}  // namespace mstep::nn

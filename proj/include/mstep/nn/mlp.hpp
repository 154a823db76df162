#pragma once

#include "mstep/core/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mstep::nn {

enum class HiddenActivation { tanh, relu };
enum class OutputActivation { identity, softmax };

struct Activations {
  HiddenActivation hidden = HiddenActivation::tanh;
  OutputActivation output = OutputActivation::identity;
};

class Mlp;

/// Parameter gradients, shape-matched to the network that produced them.
struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static Gradients zeros_like(const Mlp& net);

  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double factor);

  bool all_finite() const;
  bool congruent_with(const Mlp& net) const;
  /// Layer-major flattening, weights row-major then bias, per layer.
  std::vector<double> flatten() const;
};

/// Fully connected feed-forward network. Layer i maps layer_sizes[i] to
/// layer_sizes[i+1]; its weight matrix is stored as (out x in). Hidden layers
/// use `Activations::hidden`, the last layer `Activations::output`.
///
/// Batched calls take one sample per column.
class Mlp {
public:
  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  Mlp(std::vector<int> layer_sizes, Activations activations, std::uint64_t seed);

  Eigen::VectorXd forward(const Eigen::Ref<const Eigen::VectorXd>& input) const;
  Eigen::MatrixXd forward_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;

  /// Gradient of dot(output, output_grad) with respect to every parameter.
  Gradients backward(const Eigen::Ref<const Eigen::VectorXd>& input,
                     const Eigen::Ref<const Eigen::VectorXd>& output_grad) const;
  /// Sum over columns of the per-sample gradients.
  Gradients backward_batch(const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                           const Eigen::Ref<const Eigen::MatrixXd>& output_grads) const;
  /// Single forward pass; `output_grad_of` maps the batch outputs to the
  /// upstream gradient (typically a loss gradient).
  Gradients forward_backward(
      const Eigen::Ref<const Eigen::MatrixXd>& inputs,
      const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& output_grad_of) const;

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  const Activations& activations() const { return activations_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  std::size_t layer_count() const { return weights_.size(); }
  std::size_t parameter_count() const;

  const Eigen::MatrixXd& weights(std::size_t layer) const { return weights_.at(layer); }
  const Eigen::VectorXd& biases(std::size_t layer) const { return biases_.at(layer); }
  Eigen::MatrixXd& weights(std::size_t layer) { return weights_.at(layer); }
  Eigen::VectorXd& biases(std::size_t layer) { return biases_.at(layer); }

  /// Layer-major, row-major weights followed by bias for each layer.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

  friend bool operator==(const Mlp& a, const Mlp& b);

private:
  Mlp(std::vector<int> layer_sizes, Activations activations);
  friend Mlp load_mlp_parameters(std::vector<int>, Activations, std::span<const double>);

  void forward_cached(const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                      std::vector<Eigen::MatrixXd>& activations) const;
  Gradients backward_cached(const std::vector<Eigen::MatrixXd>& activations,
                            const Eigen::Ref<const Eigen::MatrixXd>& output_grads) const;

  std::vector<int> layer_sizes_;
  Activations activations_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

/// Rebuilds a network from a layout and a flat parameter vector.
Mlp load_mlp_parameters(std::vector<int> layer_sizes, Activations activations,
                        std::span<const double> values);

}  // namespace mstep::nn

#include "mstep/nn/loss.hpp"

#include <stdexcept>

namespace mstep::nn {

LossGrad mse_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& pred,
                       const Eigen::Ref<const Eigen::VectorXd>& target) {
  if (pred.size() != target.size() || pred.size() == 0) {
    throw std::invalid_argument("mse_loss_grad: length mismatch");
  }
  const Eigen::VectorXd diff = pred - target;
  const double dim = static_cast<double>(pred.size());
  return {diff.squaredNorm() / dim, 2.0 * diff / dim};
}

BatchLossGrad mse_loss_grad_batch(const Eigen::Ref<const Eigen::MatrixXd>& pred,
                                  const Eigen::Ref<const Eigen::MatrixXd>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols() || pred.size() == 0) {
    throw std::invalid_argument("mse_loss_grad_batch: shape mismatch");
  }
  const Eigen::MatrixXd diff = pred - target;
  const double n = static_cast<double>(pred.size());
  return {diff.squaredNorm() / n, 2.0 * diff / n};
}

}  // namespace mstep::nn

#pragma once

#include "mstep/core/types.hpp"

namespace mstep::nn {

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// Mean of squared componentwise differences and its gradient w.r.t. `pred`.
LossGrad mse_loss_grad(const Eigen::Ref<const Eigen::VectorXd>& pred,
                       const Eigen::Ref<const Eigen::VectorXd>& target);

struct BatchLossGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad;
};

/// Batch form (one sample per column): loss is averaged over samples, and the
/// gradient is that of the averaged loss.
BatchLossGrad mse_loss_grad_batch(const Eigen::Ref<const Eigen::MatrixXd>& pred,
                                  const Eigen::Ref<const Eigen::MatrixXd>& target);

}  // namespace mstep::nn

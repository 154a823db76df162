#pragma once

#include "mstep/models/predictors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mstep::harness {

struct HorizonError {
  int horizon = 0;
  /// Mean over valid start indices of ||prediction - observed||^2. Empty when
  /// the episode is shorter than the horizon.
  std::optional<double> mse;
  /// Per-dimension mean squared error, same support as `mse`.
  std::vector<double> by_dim;
  int tuples = 0;
};

/// The one-step model is composed along the logged actions for `horizon`
/// steps; the multi-step model evaluates its horizon-`horizon` network once.
/// Both start at every t with t + horizon <= T.
std::vector<HorizonError> one_step_prediction_error(const models::OneStepPredictor& model,
                                                    const Episode& episode,
                                                    const std::vector<int>& horizons);
std::vector<HorizonError> multi_step_prediction_error(const models::MultiStepPredictor& model,
                                                      const Episode& episode,
                                                      const std::vector<int>& horizons);

}  // namespace mstep::harness

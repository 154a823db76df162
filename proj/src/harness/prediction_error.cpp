#include "mstep/harness/prediction_error.hpp"

#include <span>
#include <stdexcept>

namespace mstep::harness {

namespace {

template <typename PredictFn>
std::vector<HorizonError> prediction_error(const Episode& episode,
                                           const std::vector<int>& horizons,
                                           PredictFn&& predict) {
  const int T = static_cast<int>(episode.length());
  const Eigen::Index dim = episode.states.front().size();
  std::vector<HorizonError> out;
  out.reserve(horizons.size());
  for (int h : horizons) {
    if (h < 1) throw std::invalid_argument("prediction error: horizon must be >= 1");
    HorizonError e;
    e.horizon = h;
    if (h > T) {
      out.push_back(std::move(e));
      continue;
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    for (int t = 0; t + h <= T; ++t) {
      const State predicted = predict(t, h);
      sum += (predicted - episode.states[static_cast<std::size_t>(t + h)]).array().square().matrix();
      ++e.tuples;
    }
    sum /= e.tuples;
    e.mse = sum.sum();
    e.by_dim.assign(sum.data(), sum.data() + dim);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

std::vector<HorizonError> one_step_prediction_error(const models::OneStepPredictor& model,
                                                    const Episode& episode,
                                                    const std::vector<int>& horizons) {
  return prediction_error(episode, horizons, [&](int t, int h) {
    State s = episode.states[static_cast<std::size_t>(t)];
    for (int i = 0; i < h; ++i) s = model.predict(s, episode.actions[static_cast<std::size_t>(t + i)]);
    return s;
  });
}

std::vector<HorizonError> multi_step_prediction_error(const models::MultiStepPredictor& model,
                                                      const Episode& episode,
                                                      const std::vector<int>& horizons) {
  return prediction_error(episode, horizons, [&](int t, int h) {
    if (h > model.horizon()) {
      throw std::invalid_argument("prediction error: horizon exceeds the multi-step model");
    }
    const std::span<const int> actions(episode.actions.data() + t, static_cast<std::size_t>(h));
    return model.predict(episode.states[static_cast<std::size_t>(t)], actions);
  });
}

}  // namespace mstep::harness

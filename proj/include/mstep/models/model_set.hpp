#pragma once

#include "mstep/models/models.hpp"

#include <memory>
#include <string>

namespace mstep::models {

struct ModelTrainingConfig {
  int transition_batches = 100;
  int transition_batch_size = 128;
  double transition_step_size = 1e-3;
  int reward_hidden_layers = 1;
  int reward_hidden_units = 128;
  int reward_batches = 10;
  int reward_batch_size = 128;
  double reward_step_size = 0.1;
  nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
  ModelOptions model;
};

struct NetworkLoss {
  std::string network;  // "one_step", "multi_step" or "reward"
  int horizon = 1;
  double loss = 0.0;  // mean pre-update minibatch loss
  int updates = 0;
};

struct LossReport {
  std::vector<NetworkLoss> entries;
};

/// The learned models of one agent together with their optimizer state.
/// Any of the three families may be absent.
class ModelSet {
public:
  struct Layout {
    bool one_step = false;
    int multi_step_horizon = 0;  // 0 disables the multi-step family
    bool reward = false;
  };

  ModelSet(int state_dim, int action_count, Layout layout, const ModelTrainingConfig& config,
           std::uint64_t seed);

  OneStepModel* one_step() { return one_step_.get(); }
  const OneStepModel* one_step() const { return one_step_.get(); }
  MultiStepModel* multi_step() { return multi_step_.get(); }
  const MultiStepModel* multi_step() const { return multi_step_.get(); }
  RewardModel* reward() { return reward_.get(); }
  const RewardModel* reward() const { return reward_.get(); }

  const ModelTrainingConfig& config() const { return config_; }
  bool empty() const { return !one_step_ && !multi_step_ && !reward_; }

  /// Feeds an episode into the input normalizers (no-op unless enabled).
  void observe(const Episode& episode);

  /// The configured number of minibatch updates for every network present.
  /// Horizons with no valid tuple in the buffer are skipped. Throws
  /// DivergenceError naming the network on a non-finite loss.
  LossReport train(const ReplayBuffer& buffer, Rng& rng);

private:
  ModelTrainingConfig config_;
  std::unique_ptr<OneStepModel> one_step_;
  std::unique_ptr<nn::Optimizer> one_step_opt_;
  std::unique_ptr<MultiStepModel> multi_step_;
  std::vector<nn::Optimizer> multi_step_opts_;
  std::unique_ptr<RewardModel> reward_;
  std::unique_ptr<nn::Optimizer> reward_opt_;
};

}  // namespace mstep::models

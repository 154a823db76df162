#include "mstep/models/model_set.hpp"

#include <stdexcept>

namespace mstep::models {

namespace {

nn::OptimizerSettings settings(nn::OptimizerKind kind, double step_size) {
  nn::OptimizerSettings s;
  s.kind = kind;
  s.step_size = step_size;
  return s;
}

}  // namespace

ModelSet::ModelSet(int state_dim, int action_count, Layout layout,
                   const ModelTrainingConfig& config, std::uint64_t seed)
    : config_(config) {
  if (layout.one_step) {
    one_step_ = std::make_unique<OneStepModel>(state_dim, action_count, config.model, seed);
    one_step_opt_ = std::make_unique<nn::Optimizer>(
        one_step_->network().net(), settings(config.optimizer, config.transition_step_size));
  }
  if (layout.multi_step_horizon > 0) {
    multi_step_ = std::make_unique<MultiStepModel>(state_dim, action_count,
                                                   layout.multi_step_horizon, config.model, seed);
    for (int l = 1; l <= layout.multi_step_horizon; ++l) {
      multi_step_opts_.emplace_back(multi_step_->network(l).net(),
                                    settings(config.optimizer, config.transition_step_size));
    }
  }
  if (layout.reward) {
    reward_ = std::make_unique<RewardModel>(state_dim, action_count, config.reward_hidden_units,
                                            seed ^ 0x5eedULL, config.model.activation,
                                            config.reward_hidden_layers);
    reward_opt_ = std::make_unique<nn::Optimizer>(
        reward_->net(), settings(config.optimizer, config.reward_step_size));
  }
}

void ModelSet::observe(const Episode& episode) {
  if (!config_.model.normalize_inputs) return;
  if (one_step_) one_step_->network().normalizer().observe(episode);
  if (multi_step_) {
    for (int l = 1; l <= multi_step_->horizon(); ++l) {
      multi_step_->network(l).normalizer().observe(episode);
    }
  }
}

LossReport ModelSet::train(const ReplayBuffer& buffer, Rng& rng) {
  if (buffer.empty()) throw std::invalid_argument("ModelSet::train: empty buffer");
  LossReport report;
  const auto batch_size = static_cast<std::size_t>(config_.transition_batch_size);

  auto train_net = [&](TransitionNet& net, nn::Optimizer& opt, const std::string& name) {
    const int l = net.length();
    if (buffer.valid_start_count(l) == 0) return;
    NetworkLoss entry{name, l, 0.0, 0};
    for (int b = 0; b < config_.transition_batches; ++b) {
      const MultiStepBatch batch = buffer.sample_multistep_batch(l, batch_size, rng);
      try {
        entry.loss += net.train_batch(batch, opt);
      } catch (const DivergenceError& e) {
        throw DivergenceError(name + " " + e.what());
      }
      ++entry.updates;
    }
    if (entry.updates > 0) entry.loss /= entry.updates;
    report.entries.push_back(entry);
  };

  if (one_step_) train_net(one_step_->network(), *one_step_opt_, "one_step");
  if (multi_step_) {
    for (int l = 1; l <= multi_step_->horizon(); ++l) {
      train_net(multi_step_->network(l), multi_step_opts_[static_cast<std::size_t>(l - 1)],
                "multi_step");
    }
  }
  if (reward_) {
    NetworkLoss entry{"reward", 1, 0.0, 0};
    const auto rb = static_cast<std::size_t>(config_.reward_batch_size);
    for (int b = 0; b < config_.reward_batches; ++b) {
      const MultiStepBatch batch = buffer.sample_multistep_batch(1, rb, rng);
      entry.loss += reward_->train_batch(batch, *reward_opt_);
      ++entry.updates;
    }
    if (entry.updates > 0) entry.loss /= entry.updates;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace mstep::models

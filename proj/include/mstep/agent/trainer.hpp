#pragma once

#include "mstep/agent/critic.hpp"
#include "mstep/envs/environment.hpp"
#include "mstep/models/model_set.hpp"
#include "mstep/rollout/rollout.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mstep::agent {

enum class TargetKind { model_free_td0, one_step_model, multi_step_model };

std::string to_string(TargetKind kind);
TargetKind parse_target_kind(const std::string& text);

/// Per-domain hyperparameters, one field per row of the control-domain table.
struct DomainHyperparameters {
  double gamma = 0.9999;
  int critic_hidden_layers = 1;
  int critic_hidden_units = 64;
  std::vector<double> critic_step_sizes;
  int critic_batches = 20;
  int critic_batch_size = 32;
  int actor_hidden_layers = 1;
  int actor_hidden_units = 64;
  double actor_step_size = 0.005;
  int actor_batches = 1;
  int transition_hidden_layers = 1;
  int transition_hidden_units = 64;
  double transition_step_size = 0.001;
  int transition_batches = 100;
  int transition_batch_size = 128;
  int reward_hidden_layers = 1;
  int reward_hidden_units = 128;
  double reward_step_size = 0.1;
  int reward_batches = 10;
  int reward_batch_size = 128;
  int buffer_size = 8000;
  int target_update_episodes = 1;
  int max_episode_steps = 0;  // 0: the environment's default cap

  static DomainHyperparameters for_domain(const std::string& domain);
};

struct AgentConfig {
  std::string domain = "cartpole";
  DomainHyperparameters hyper = DomainHyperparameters::for_domain("cartpole");
  double critic_step_size = 0.01;
  TargetKind target_kind = TargetKind::model_free_td0;
  rollout::RolloutConfig rollout;  // gamma is overwritten from `hyper`
  int episodes = 500;
  std::uint64_t seed = 0;
  nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
  models::ModelOptions model;
  /// When > 0, one-step and multi-step models up to this horizon are trained
  /// for prediction-error measurement, whatever the target kind.
  int error_horizon = 0;

  void validate() const;
  models::ModelTrainingConfig model_training() const;
  models::ModelSet::Layout model_layout() const;
};

/// Runs one episode with actions drawn from the actor, capped at the
/// environment's max_episode_steps.
Episode run_episode(const envs::Environment& env, const Actor& actor, Rng& rng);

struct CriticUpdateStats {
  double mean_loss = 0.0;
  int updates = 0;
};

/// Models the critic may plan with. Pointers may be null for kinds that do
/// not need them.
struct PlanningModels {
  const models::OneStepPredictor* one_step = nullptr;
  const models::MultiStepPredictor* multi_step = nullptr;
  const models::RewardPredictor* reward = nullptr;
};

/// Regression target for one replayed transition. A terminal transition
/// yields its reward for every kind.
double critic_target(const Transition& transition, TargetKind kind, const PlanningModels& planning,
                     const Policy& policy, const ActionValueFunction& bootstrap,
                     const rollout::RolloutConfig& config, Rng& rng);

/// Exactly `batches` minibatch regressions of Q(s, a) towards the selected
/// target, bootstrapping from the critic's target network.
CriticUpdateStats critic_update(Critic& critic, const models::ReplayBuffer& buffer,
                                TargetKind kind, const PlanningModels& planning,
                                const Policy& policy, const rollout::RolloutConfig& config,
                                int batches, int batch_size, Rng& rng);

enum class Phase {
  run_episode,
  evaluate_models,
  add_to_buffer,
  train_models,
  critic_update,
  actor_update,
  sync_target,
};

std::string to_string(Phase phase);

struct PhaseEvent {
  int episode = 0;
  Phase phase = Phase::run_episode;
};

struct EpisodeRecord {
  int episode = 0;
  double total_return = 0.0;
  int length = 0;
  double critic_loss = 0.0;
  int critic_updates = 0;
};

/// Called once per episode, after the episode ran and before it is used for
/// any training, with the models as they stood.
using EpisodeObserver =
    std::function<void(int episode, const Episode& data, const models::ModelSet& models)>;

/// Actor-critic learner. Updates happen once per episode, at its end.
class Agent {
public:
  explicit Agent(AgentConfig config);

  /// run_episode, observer, buffer insert, model training, critic update,
  /// actor update, target refresh.
  EpisodeRecord train_episode(const EpisodeObserver& observer = {});

  const AgentConfig& config() const { return config_; }
  const envs::Environment& environment() const { return *env_; }
  Actor& actor() { return actor_; }
  const Actor& actor() const { return actor_; }
  Critic& critic() { return critic_; }
  const Critic& critic() const { return critic_; }
  models::ModelSet& models() { return models_; }
  const models::ModelSet& models() const { return models_; }
  const models::ReplayBuffer& buffer() const { return buffer_; }
  const std::vector<PhaseEvent>& events() const { return events_; }
  const std::vector<std::pair<int, models::LossReport>>& model_losses() const {
    return model_losses_;
  }
  int episodes_run() const { return episode_; }

private:
  PlanningModels planning() const;

  AgentConfig config_;
  std::unique_ptr<envs::Environment> env_;
  Actor actor_;
  Critic critic_;
  models::ModelSet models_;
  models::ReplayBuffer buffer_;
  Rng env_rng_;
  Rng model_rng_;
  Rng critic_rng_;
  int episode_ = 0;
  std::vector<PhaseEvent> events_;
  std::vector<std::pair<int, models::LossReport>> model_losses_;
};

struct TrainingResult {
  std::vector<EpisodeRecord> episodes;
  std::vector<PhaseEvent> events;
  std::vector<std::pair<int, models::LossReport>> model_losses;
};

TrainingResult train_agent(const AgentConfig& config, const EpisodeObserver& observer = {});

}  // namespace mstep::agent

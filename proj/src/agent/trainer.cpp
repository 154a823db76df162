#include "mstep/agent/trainer.hpp"

#include "mstep/core/random.hpp"

#include <algorithm>
#include <stdexcept>

namespace mstep::agent {

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::model_free_td0: return "td0";
    case TargetKind::one_step_model: return "one_step";
    case TargetKind::multi_step_model: return "multi_step";
  }
  return "?";
}

TargetKind parse_target_kind(const std::string& text) {
  if (text == "td0" || text == "model_free_td0") return TargetKind::model_free_td0;
  if (text == "one_step" || text == "one_step_model") return TargetKind::one_step_model;
  if (text == "multi_step" || text == "multi_step_model") return TargetKind::multi_step_model;
  throw std::invalid_argument("unknown target kind '" + text +
                              "' (expected td0, one_step or multi_step)");
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::run_episode: return "run_episode";
    case Phase::evaluate_models: return "evaluate_models";
    case Phase::add_to_buffer: return "add_to_buffer";
    case Phase::train_models: return "train_models";
    case Phase::critic_update: return "critic_update";
    case Phase::actor_update: return "actor_update";
    case Phase::sync_target: return "sync_target";
  }
  return "?";
}

DomainHyperparameters DomainHyperparameters::for_domain(const std::string& domain) {
  DomainHyperparameters h;
  if (domain == "cartpole") {
    h.critic_step_sizes = {0.1, 0.05, 0.025, 0.01};
    h.actor_step_size = 0.005;
    h.transition_step_size = 0.001;
    h.transition_batches = 100;
    h.transition_batch_size = 128;
    h.reward_step_size = 0.1;
    h.buffer_size = 8000;
  } else if (domain == "acrobot") {
    h.critic_step_sizes = {0.005, 0.0025, 0.001, 0.0005};
    h.actor_step_size = 0.0005;
    h.transition_step_size = 0.01;
    h.transition_batches = 20;
    h.transition_batch_size = 1024;
    h.reward_step_size = 0.1;
    h.buffer_size = 5000;
  } else {
    throw std::invalid_argument("no hyperparameters for domain '" + domain + "'");
  }
  return h;
}

void AgentConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("episode budget must be >= 1");
  rollout.validate();
  if (!(critic_step_size >= 0.0)) throw std::invalid_argument("critic step size must be >= 0");
  if (error_horizon < 0) throw std::invalid_argument("error horizon must be >= 0");
  if (hyper.critic_batches < 0 || hyper.critic_batch_size < 1 || hyper.actor_batches < 0 ||
      hyper.transition_batches < 0 || hyper.transition_batch_size < 1 ||
      hyper.reward_batches < 0 || hyper.reward_batch_size < 1 || hyper.buffer_size < 1 ||
      hyper.target_update_episodes < 1) {
    throw std::invalid_argument("invalid batch / buffer hyperparameters");
  }
  if (!(hyper.gamma > 0.0 && hyper.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }
}

models::ModelTrainingConfig AgentConfig::model_training() const {
  models::ModelTrainingConfig t;
  t.transition_batches = hyper.transition_batches;
  t.transition_batch_size = hyper.transition_batch_size;
  t.transition_step_size = hyper.transition_step_size;
  t.reward_hidden_layers = hyper.reward_hidden_layers;
  t.reward_hidden_units = hyper.reward_hidden_units;
  t.reward_batches = hyper.reward_batches;
  t.reward_batch_size = hyper.reward_batch_size;
  t.reward_step_size = hyper.reward_step_size;
  t.optimizer = optimizer;
  t.model = model;
  t.model.hidden_layers = hyper.transition_hidden_layers;
  t.model.hidden_units = hyper.transition_hidden_units;
  return t;
}

models::ModelSet::Layout AgentConfig::model_layout() const {
  models::ModelSet::Layout layout;
  if (target_kind == TargetKind::one_step_model) {
    layout.one_step = true;
    layout.reward = true;
  } else if (target_kind == TargetKind::multi_step_model) {
    layout.multi_step_horizon = rollout.horizon;
    layout.reward = true;
  }
  if (error_horizon > 0) {
    layout.one_step = true;
    layout.multi_step_horizon = std::max(layout.multi_step_horizon, error_horizon);
  }
  return layout;
}

Episode run_episode(const envs::Environment& env, const Actor& actor, Rng& rng) {
  const envs::EnvSpec spec = env.spec();
  Episode ep;
  ep.states.push_back(env.reset(rng));
  while (static_cast<int>(ep.length()) < spec.max_episode_steps) {
    const int a = actor.act(ep.states.back(), rng);
    envs::StepResult r = env.step(ep.states.back(), a);
    ep.actions.push_back(a);
    ep.rewards.push_back(r.reward);
    ep.states.push_back(std::move(r.next_state));
    if (r.done) {
      ep.terminated = true;
      return ep;
    }
  }
  ep.truncated = true;
  return ep;
}

double critic_target(const Transition& transition, TargetKind kind, const PlanningModels& planning,
                     const Policy& policy, const ActionValueFunction& bootstrap,
                     const rollout::RolloutConfig& config, Rng& rng) {
  if (transition.terminal) return transition.reward;
  switch (kind) {
    case TargetKind::model_free_td0:
      return rollout::td0_target(transition, bootstrap, policy, config.gamma, rng);
    case TargetKind::one_step_model:
      if (planning.one_step == nullptr || planning.reward == nullptr) {
        throw std::logic_error("one-step targets need a one-step and a reward model");
      }
      return rollout::one_step_model_target(transition.state, transition.action, policy,
                                            bootstrap, *planning.reward, *planning.one_step,
                                            config, rng)
          .value;
    case TargetKind::multi_step_model:
      if (planning.multi_step == nullptr || planning.reward == nullptr) {
        throw std::logic_error("multi-step targets need a multi-step and a reward model");
      }
      return rollout::estimate_target(transition.state, transition.action, policy, bootstrap,
                                      *planning.reward, *planning.multi_step, config, rng)
          .value;
  }
  throw std::logic_error("unhandled target kind");
}

CriticUpdateStats critic_update(Critic& critic, const models::ReplayBuffer& buffer,
                                TargetKind kind, const PlanningModels& planning,
                                const Policy& policy, const rollout::RolloutConfig& config,
                                int batches, int batch_size, Rng& rng) {
  if (buffer.empty()) throw std::invalid_argument("critic_update: empty buffer");
  CriticUpdateStats stats;
  const QNetworkView bootstrap = critic.target();
  for (int b = 0; b < batches; ++b) {
    const std::vector<Transition> batch =
        buffer.sample_transitions(static_cast<std::size_t>(batch_size), rng);
    Eigen::MatrixXd states(batch.front().state.size(), static_cast<Eigen::Index>(batch.size()));
    std::vector<int> actions;
    std::vector<double> targets;
    actions.reserve(batch.size());
    targets.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      states.col(static_cast<Eigen::Index>(i)) = batch[i].state;
      actions.push_back(batch[i].action);
      targets.push_back(critic_target(batch[i], kind, planning, policy, bootstrap, config, rng));
    }
    stats.mean_loss += critic.regress(states, actions, targets);
    ++stats.updates;
  }
  if (stats.updates > 0) stats.mean_loss /= stats.updates;
  return stats;
}

namespace {

nn::OptimizerSettings optimizer_settings(nn::OptimizerKind kind, double step) {
  nn::OptimizerSettings s;
  s.kind = kind;
  s.step_size = step;
  return s;
}

const AgentConfig& validated(const AgentConfig& c) {
  c.validate();
  return c;
}

}  // namespace

Agent::Agent(AgentConfig config)
    : config_(validated(config)),
      env_(envs::make_environment(config_.domain, config_.hyper.max_episode_steps)),
      actor_(env_->spec().state_dim, env_->spec().action_count,
             {config_.hyper.actor_hidden_layers, config_.hyper.actor_hidden_units,
              config_.model.activation},
             optimizer_settings(config_.optimizer, config_.hyper.actor_step_size),
             splitmix64(config_.seed ^ 0xac7011ULL)),
      critic_(env_->spec().state_dim, env_->spec().action_count,
              {config_.hyper.critic_hidden_layers, config_.hyper.critic_hidden_units,
               config_.model.activation},
              optimizer_settings(config_.optimizer, config_.critic_step_size),
              splitmix64(config_.seed ^ 0xc217cULL)),
      models_(env_->spec().state_dim, env_->spec().action_count, config_.model_layout(),
              config_.model_training(), splitmix64(config_.seed ^ 0x30de1ULL)),
      buffer_(static_cast<std::size_t>(config_.hyper.buffer_size)),
      env_rng_(derived_rng(config_.seed, 1)),
      model_rng_(derived_rng(config_.seed, 2)),
      critic_rng_(derived_rng(config_.seed, 3)) {
  config_.rollout.gamma = config_.hyper.gamma;
}

PlanningModels Agent::planning() const {
  return {models_.one_step(), models_.multi_step(), models_.reward()};
}

EpisodeRecord Agent::train_episode(const EpisodeObserver& observer) {
  const int e = episode_;
  Episode episode = run_episode(*env_, actor_, env_rng_);
  events_.push_back({e, Phase::run_episode});

  if (observer) {
    observer(e, episode, models_);
    events_.push_back({e, Phase::evaluate_models});
  }

  EpisodeRecord record;
  record.episode = e;
  record.total_return = episode.total_return();
  record.length = static_cast<int>(episode.length());

  models_.observe(episode);
  // The actor update below needs the episode after the buffer took its copy.
  buffer_.add_episode(episode);
  events_.push_back({e, Phase::add_to_buffer});

  if (!models_.empty()) {
    model_losses_.emplace_back(e, models_.train(buffer_, model_rng_));
    events_.push_back({e, Phase::train_models});
  }

  const CriticUpdateStats stats =
      critic_update(critic_, buffer_, config_.target_kind, planning(), actor_, config_.rollout,
                    config_.hyper.critic_batches, config_.hyper.critic_batch_size, critic_rng_);
  record.critic_loss = stats.mean_loss;
  record.critic_updates = stats.updates;
  events_.push_back({e, Phase::critic_update});

  for (int b = 0; b < config_.hyper.actor_batches; ++b) actor_.update(critic_, episode);
  events_.push_back({e, Phase::actor_update});

  if ((e + 1) % config_.hyper.target_update_episodes == 0) {
    critic_.sync_target();
    events_.push_back({e, Phase::sync_target});
  }
  ++episode_;
  return record;
}

TrainingResult train_agent(const AgentConfig& config, const EpisodeObserver& observer) {
  Agent agent(config);
  TrainingResult result;
  result.episodes.reserve(static_cast<std::size_t>(config.episodes));
  for (int e = 0; e < config.episodes; ++e) {
    result.episodes.push_back(agent.train_episode(observer));
  }
  result.events = agent.events();
  result.model_losses = agent.model_losses();
  return result;
}

}  // namespace mstep::agent

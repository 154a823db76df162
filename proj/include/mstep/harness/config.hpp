#pragma once

#include "mstep/agent/trainer.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mstep::harness {

/// Everything one experiment grid needs. Loaded from a sectioned key-value
/// file: an [experiment] section plus one section per domain whose keys are
/// the control-domain hyperparameter row names (see configs/*.cfg).
struct ExperimentConfig {
  std::string domain = "cartpole";
  std::vector<agent::TargetKind> target_kinds{agent::TargetKind::model_free_td0,
                                              agent::TargetKind::multi_step_model};
  std::vector<int> horizons{2, 3, 5};
  int k_samples = 5;
  std::vector<std::uint64_t> seeds;
  int episodes = 500;
  agent::DomainHyperparameters hyper = agent::DomainHyperparameters::for_domain("cartpole");
  /// Critic step sizes actually run; several values form a tuning sweep.
  std::vector<double> critic_step_sizes{0.01};
  rollout::BootstrapExponent bootstrap = rollout::BootstrapExponent::paper;
  int error_horizon = 0;
  models::ModelOptions model;
  nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
  bool save_checkpoints = false;
  int workers = 1;
  std::filesystem::path output_dir = "results";

  void validate() const;
  /// Canonical, ordered key-value rendering. Two configs describing the same
  /// experiment render identically; used for the manifest hash.
  std::string canonical_text() const;
};

/// Key -> raw value overrides as typed on the command line, applied after
/// the file. Keys use the [experiment] section's names.
using Overrides = std::map<std::string, std::string>;

ExperimentConfig default_config(const std::string& domain);
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});

std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::string to_string(rollout::BootstrapExponent e);

/// Git-style object id of `content`: SHA-1 over "blob <size>\0<content>".
std::string git_blob_hash(const std::string& content);

}  // namespace mstep::harness

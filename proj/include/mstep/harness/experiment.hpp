#pragma once

#include "mstep/harness/config.hpp"
#include "mstep/harness/prediction_error.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mstep::harness {

/// One grid cell: a single training run.
struct Cell {
  agent::TargetKind kind = agent::TargetKind::model_free_td0;
  int horizon = 0;  // 0 for the model-free arm
  int k_samples = 0;  // 0 for the model-free arm
  double critic_step_size = 0.0;
  std::uint64_t seed = 0;

  std::string run_id(const std::string& domain) const;
};

/// domain x kind x horizon x step size x seed. The model-free arm has no
/// horizon and appears once per (step size, seed).
std::vector<Cell> expand_grid(const ExperimentConfig& config);

agent::AgentConfig agent_config(const ExperimentConfig& config, const Cell& cell);

struct ErrorRecord {
  int episode = 0;
  std::string model_kind;  // "one_step" or "multi_step"
  int horizon = 0;
  double mse = 0.0;
  std::vector<double> by_dim;
};

struct CellResult {
  Cell cell;
  std::string run_id;
  agent::TrainingResult training;
  std::vector<ErrorRecord> errors;
};

/// Prediction errors of every model family present in `models`, at horizons
/// 1..max_horizon, on an episode the models have not trained on. Absent
/// horizons produce no record.
std::vector<ErrorRecord> evaluate_models(int episode_index, const Episode& episode,
                                         const models::ModelSet& models, int max_horizon);

/// Trains the cell. With a checkpoint directory, the final networks are
/// saved under it.
CellResult run_cell(const ExperimentConfig& config, const Cell& cell,
                    const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt);

/// runs/, errors/, errors_by_dim/, losses/ and events/ files of one cell.
void write_cell(const std::filesystem::path& out, const ExperimentConfig& config,
                const CellResult& result);

struct CellFailure {
  std::string run_id;
  std::string error;
};

struct ExperimentSummary {
  std::vector<std::string> run_ids;  // completed cells, grid order
  std::vector<CellFailure> failures;
};

/// Runs the whole grid on a pool of config.workers threads, then writes the
/// aggregates and manifest.json. A failing cell is recorded and the others
/// proceed.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// Recomputes aggregate/ from the raw runs/ and errors/ files under `out`.
void write_aggregates(const std::filesystem::path& out);

void write_manifest(const std::filesystem::path& out, const ExperimentConfig& config,
                    const std::vector<Cell>& cells, const ExperimentSummary& summary);

/// Loads the checkpointed actor and models of one run and measures model
/// prediction error on `episodes` fresh episodes of the saved policy.
std::vector<ErrorRecord> evaluate_checkpoint(const ExperimentConfig& config,
                                             const std::filesystem::path& checkpoint,
                                             int episodes, std::uint64_t seed, int max_horizon);

}  // namespace mstep::harness

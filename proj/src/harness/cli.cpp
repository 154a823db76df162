#include "mstep/harness/cli.hpp"

#include "mstep/harness/csv.hpp"
#include "mstep/harness/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>

namespace mstep::harness {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

struct Flags {
  std::string config;
  std::string domain;
  std::string target_kind;
  std::string horizon;
  std::string k_samples;
  std::string seed;
  std::string episodes;
  std::string out;
  std::string workers;
  std::string critic_step_size;
  std::string error_horizon;
  std::string bootstrap;
  std::string checkpoint;
  bool paper_seeds = false;
};

ExperimentConfig resolve(const Flags& f, bool config_required) {
  Overrides o;
  if (const char* env = std::getenv("MSTEP_WORKERS"); env != nullptr && *env != '\0') {
    o["workers"] = env;
  }
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) o[key] = v;
  };
  set("domain", f.domain);
  set("target kinds", f.target_kind);
  set("horizons", f.horizon);
  set("k samples", f.k_samples);
  set("seeds", f.seed);
  set("episodes", f.episodes);
  set("output directory", f.out);
  set("workers", f.workers);
  set("critic step size", f.critic_step_size);
  set("error horizon", f.error_horizon);
  set("bootstrap exponent", f.bootstrap);
  if (f.paper_seeds) o["seeds"] = "0-49";

  if (f.config.empty()) {
    if (config_required) throw UsageError("--config is required");
    return parse_config("", o);
  }
  if (!std::filesystem::exists(f.config)) throw UsageError("config file not found: " + f.config);
  return load_config(f.config, o);
}

int run_grid(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const ExperimentSummary summary = run_experiment(config);
  out << "completed " << summary.run_ids.size() << " run(s) in " << config.output_dir.string()
      << '\n';
  if (summary.failures.empty()) return 0;
  for (const auto& f : summary.failures) report_error(err, "cell_failed", f.run_id + ": " + f.error);
  return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-step model experiments"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", f.config, "Experiment config file");
    cmd->add_option("--domain", f.domain, "cartpole or acrobot");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--workers", f.workers, "Worker threads (default: MSTEP_WORKERS or config)");
  };
  auto add_grid = [&](CLI::App* cmd) {
    add_common(cmd);
    cmd->add_option("--target-kind", f.target_kind, "td0, one_step or multi_step (comma list)");
    cmd->add_option("--horizon", f.horizon, "Model horizon n (comma list)");
    cmd->add_option("--k-samples", f.k_samples, "Sampled trajectories per target");
    cmd->add_option("--seed", f.seed, "Seed, list or range such as 0-19");
    cmd->add_option("--episodes", f.episodes, "Episodes per run");
    cmd->add_option("--critic-step-size", f.critic_step_size, "Critic step size (comma list)");
    cmd->add_option("--error-horizon", f.error_horizon, "Record model error up to this horizon");
    cmd->add_option("--bootstrap-exponent", f.bootstrap, "paper or standard");
    cmd->add_flag("--paper-seeds", f.paper_seeds, "Use 50 seeds");
  };

  CLI::App* train = app.add_subcommand("train", "Run one grid cell");
  add_grid(train);
  CLI::App* sweep = app.add_subcommand("sweep", "Run the full grid");
  add_grid(sweep);
  CLI::App* eval = app.add_subcommand("eval-model", "Model error of a saved checkpoint");
  add_common(eval);
  eval->add_option("--checkpoint", f.checkpoint, "checkpoints/<run_id> directory")->required();
  eval->add_option("--episodes", f.episodes, "Evaluation episodes");
  eval->add_option("--seed", f.seed, "Evaluation seed");
  eval->add_option("--error-horizon", f.error_horizon, "Largest horizon");
  CLI::App* report = app.add_subcommand("report", "Recompute aggregates from raw CSVs");
  report->add_option("--out", f.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return 2;
  }

  ExperimentConfig config;
  try {
    if (*report) {
      write_aggregates(f.out);
      out << "aggregates written to " << f.out << '\n';
      return 0;
    }
    config = resolve(f, *sweep || *eval);
    if (*train) {
      // One cell: the first entry of each list.
      config.target_kinds.resize(1);
      config.horizons.resize(1);
      config.seeds.resize(1);
      config.critic_step_sizes.resize(1);
    }
  } catch (const UsageError& e) {
    report_error(err, "usage", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    report_error(err, "validation", e.what());
    return 2;
  }

  try {
    if (*eval) {
      const int episodes = f.episodes.empty() ? 10 : config.episodes;
      const int max_h = config.error_horizon > 0 ? config.error_horizon : 10;
      const auto rows = evaluate_checkpoint(config, f.checkpoint, episodes,
                                            config.seeds.front(), max_h);
      const std::string name = std::filesystem::path(f.checkpoint).filename().string();
      CsvWriter w(config.output_dir / "errors" / (name + ".csv"),
                  {"run_id", "episode", "model_kind", "horizon", "mse"});
      for (const auto& r : rows) {
        w << name << r.episode << r.model_kind << r.horizon << r.mse;
        w.end_row();
      }
      w.close();
      out << rows.size() << " error rows written\n";
      return 0;
    }
    return run_grid(config, out, err);
  } catch (const std::invalid_argument& e) {
    report_error(err, "validation", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, "runtime", e.what());
    return 1;
  }
}

}  // namespace mstep::harness

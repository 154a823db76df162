#include "mstep/harness/experiment.hpp"

#include "mstep/harness/csv.hpp"
#include "mstep/harness/stats.hpp"
#include "mstep/nn/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <thread>
#include <tuple>

namespace mstep::harness {

namespace fs = std::filesystem;

std::string Cell::run_id(const std::string& domain) const {
  char step[32];
  std::snprintf(step, sizeof step, "%g", critic_step_size);
  return domain + "-" + agent::to_string(kind) + "-n" + std::to_string(horizon) + "-k" +
         std::to_string(k_samples) + "-a" + step + "-s" + std::to_string(seed);
}

std::vector<Cell> expand_grid(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (agent::TargetKind kind : config.target_kinds) {
    const bool model_free = kind == agent::TargetKind::model_free_td0;
    const std::vector<int> horizons = model_free ? std::vector<int>{0} : config.horizons;
    for (int h : horizons) {
      for (double step : config.critic_step_sizes) {
        for (std::uint64_t seed : config.seeds) {
          cells.push_back({kind, h, model_free ? 0 : config.k_samples, step, seed});
        }
      }
    }
  }
  return cells;
}

agent::AgentConfig agent_config(const ExperimentConfig& config, const Cell& cell) {
  agent::AgentConfig a;
  a.domain = config.domain;
  a.hyper = config.hyper;
  a.critic_step_size = cell.critic_step_size;
  a.target_kind = cell.kind;
  a.rollout.horizon = std::max(cell.horizon, 1);
  a.rollout.samples = std::max(cell.k_samples, 1);
  a.rollout.gamma = config.hyper.gamma;
  a.rollout.bootstrap = config.bootstrap;
  a.episodes = config.episodes;
  a.seed = cell.seed;
  a.optimizer = config.optimizer;
  a.model = config.model;
  a.error_horizon = config.error_horizon;
  return a;
}

namespace {

std::vector<int> horizons_up_to(int n) {
  std::vector<int> h(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(h.begin(), h.end(), 1);
  return h;
}

void append_errors(std::vector<ErrorRecord>& out, int episode, const std::string& kind,
                   const std::vector<HorizonError>& errors) {
  for (const auto& e : errors) {
    if (e.mse) out.push_back({episode, kind, e.horizon, *e.mse, e.by_dim});
  }
}

std::vector<ErrorRecord> model_errors(int episode_index, const Episode& episode,
                                      const models::OneStepPredictor* one_step,
                                      const models::MultiStepPredictor* multi_step,
                                      int max_horizon) {
  std::vector<ErrorRecord> out;
  if (max_horizon < 1) return out;
  if (one_step != nullptr) {
    append_errors(out, episode_index, "one_step",
                  one_step_prediction_error(*one_step, episode, horizons_up_to(max_horizon)));
  }
  if (multi_step != nullptr) {
    append_errors(
        out, episode_index, "multi_step",
        multi_step_prediction_error(*multi_step, episode,
                                    horizons_up_to(std::min(max_horizon, multi_step->horizon()))));
  }
  return out;
}

void save_checkpoint(const fs::path& dir, const agent::Agent& agent) {
  fs::create_directories(dir);
  nn::save_mlps({&agent.actor().net()}, dir / "actor.msnn");
  nn::save_mlps({&agent.critic().net()}, dir / "critic.msnn");
  const models::ModelSet& m = agent.models();
  if (m.one_step() != nullptr) {
    nn::save_mlps({&m.one_step()->network().net()}, dir / "one_step.msnn");
  }
  if (m.multi_step() != nullptr) {
    std::vector<const nn::Mlp*> nets;
    for (int l = 1; l <= m.multi_step()->horizon(); ++l) {
      nets.push_back(&m.multi_step()->network(l).net());
    }
    nn::save_mlps(nets, dir / "multi_step.msnn");
  }
  if (m.reward() != nullptr) nn::save_mlps({&m.reward()->net()}, dir / "reward.msnn");
}

}  // namespace

std::vector<ErrorRecord> evaluate_models(int episode_index, const Episode& episode,
                                         const models::ModelSet& models, int max_horizon) {
  return model_errors(episode_index, episode, models.one_step(), models.multi_step(),
                      max_horizon);
}

CellResult run_cell(const ExperimentConfig& config, const Cell& cell,
                    const std::optional<fs::path>& checkpoint_dir) {
  CellResult result;
  result.cell = cell;
  result.run_id = cell.run_id(config.domain);
  agent::Agent agent(agent_config(config, cell));
  agent::EpisodeObserver observer;
  if (config.error_horizon > 0) {
    observer = [&](int e, const Episode& episode, const models::ModelSet& models) {
      auto errors = evaluate_models(e, episode, models, config.error_horizon);
      result.errors.insert(result.errors.end(), std::make_move_iterator(errors.begin()),
                           std::make_move_iterator(errors.end()));
    };
  }
  result.training.episodes.reserve(static_cast<std::size_t>(config.episodes));
  for (int e = 0; e < config.episodes; ++e) {
    result.training.episodes.push_back(agent.train_episode(observer));
  }
  result.training.events = agent.events();
  result.training.model_losses = agent.model_losses();
  if (checkpoint_dir) save_checkpoint(*checkpoint_dir / result.run_id, agent);
  return result;
}

void write_cell(const fs::path& out, const ExperimentConfig& config, const CellResult& r) {
  const std::string& id = r.run_id;
  CsvWriter runs(out / "runs" / (id + ".csv"),
                 {"domain", "target_kind", "horizon", "k_samples", "seed", "episode", "return",
                  "critic_loss", "critic_step_size"});
  for (const auto& e : r.training.episodes) {
    runs << config.domain << agent::to_string(r.cell.kind) << r.cell.horizon << r.cell.k_samples
         << static_cast<unsigned long long>(r.cell.seed) << e.episode << e.total_return
         << e.critic_loss << r.cell.critic_step_size;
    runs.end_row();
  }

  CsvWriter errors(out / "errors" / (id + ".csv"),
                   {"run_id", "episode", "model_kind", "horizon", "mse"});
  CsvWriter by_dim(out / "errors_by_dim" / (id + ".csv"),
                   {"run_id", "episode", "model_kind", "horizon", "dim", "mse"});
  for (const auto& e : r.errors) {
    errors << id << e.episode << e.model_kind << e.horizon << e.mse;
    errors.end_row();
    for (std::size_t d = 0; d < e.by_dim.size(); ++d) {
      by_dim << id << e.episode << e.model_kind << e.horizon << static_cast<int>(d) << e.by_dim[d];
      by_dim.end_row();
    }
  }

  CsvWriter losses(out / "losses" / (id + ".csv"),
                   {"run_id", "episode", "network", "horizon", "loss"});
  for (const auto& [episode, report] : r.training.model_losses) {
    for (const auto& entry : report.entries) {
      losses << id << episode << entry.network << entry.horizon << entry.loss;
      losses.end_row();
    }
  }

  CsvWriter events(out / "events" / (id + ".csv"), {"run_id", "episode", "phase"});
  for (const auto& ev : r.training.events) {
    events << id << ev.episode << agent::to_string(ev.phase);
    events.end_row();
  }

  runs.close();
  errors.close();
  by_dim.close();
  losses.close();
  events.close();
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<Cell> cells = expand_grid(config);
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  std::optional<fs::path> checkpoints;
  if (config.save_checkpoints) checkpoints = out / "checkpoints";

  std::vector<std::optional<std::string>> failures(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        write_cell(out, config, run_cell(config, cells[i], checkpoints));
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const std::size_t width =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers), cells.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < width; ++w) pool.emplace_back(worker);
    worker();
  }

  ExperimentSummary summary;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string id = cells[i].run_id(config.domain);
    if (failures[i]) {
      summary.failures.push_back({id, *failures[i]});
    } else {
      summary.run_ids.push_back(id);
    }
  }
  write_aggregates(out);
  write_manifest(out, config, cells, summary);
  return summary;
}

namespace {

struct RunMeta {
  std::string domain;
  std::string target_kind;
  std::string horizon;
  std::string k_samples;
  std::string critic_step_size;

  auto key() const { return std::tie(domain, target_kind, horizon, k_samples, critic_step_size); }
  bool operator<(const RunMeta& o) const { return key() < o.key(); }
};

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Mean and standard error across runs of a per-episode series. Episodes a
// run lacks do not count towards n.
using Series = std::map<int, double>;

void write_series_rows(CsvWriter& w, const std::vector<std::string>& prefix,
                       const std::vector<Series>& runs) {
  std::map<int, std::vector<double>> by_episode;
  for (const auto& s : runs) {
    for (const auto& [e, v] : s) by_episode[e].push_back(v);
  }
  for (const auto& [e, values] : by_episode) {
    const MeanSe m = mean_se(values);
    for (const auto& p : prefix) w << p;
    w << e << m.mean << m.standard_error << static_cast<int>(m.n);
    w.end_row();
  }
}

void write_auc_row(CsvWriter& w, const std::vector<std::string>& prefix,
                   const std::vector<Series>& runs) {
  std::vector<double> aucs;
  for (const auto& s : runs) {
    if (s.empty()) continue;
    std::vector<double> v;
    for (const auto& [e, x] : s) v.push_back(x);
    aucs.push_back(auc(v));
  }
  const MeanSe m = mean_se(aucs);
  for (const auto& p : prefix) w << p;
  w << m.mean << m.standard_error << static_cast<int>(m.n);
  w.end_row();
}

}  // namespace

void write_aggregates(const fs::path& out) {
  std::map<std::string, RunMeta> meta;
  std::map<RunMeta, std::vector<Series>> returns;
  for (const auto& file : sorted_files(out / "runs")) {
    const CsvTable t = read_csv(file);
    if (t.rows.empty()) continue;
    const auto& first = t.rows.front();
    RunMeta m{first[t.column("domain")], first[t.column("target_kind")],
              first[t.column("horizon")], first[t.column("k_samples")],
              first[t.column("critic_step_size")]};
    meta[file.stem().string()] = m;
    Series s;
    for (const auto& row : t.rows) {
      s[std::stoi(row[t.column("episode")])] = std::stod(row[t.column("return")]);
    }
    returns[m].push_back(std::move(s));
  }

  using ErrorKey = std::tuple<RunMeta, std::string, int>;  // arm, model kind, horizon
  std::map<ErrorKey, std::vector<Series>> errors;
  for (const auto& file : sorted_files(out / "errors")) {
    const auto it = meta.find(file.stem().string());
    if (it == meta.end()) continue;
    const CsvTable t = read_csv(file);
    std::map<std::pair<std::string, int>, Series> per_run;
    for (const auto& row : t.rows) {
      per_run[{row[t.column("model_kind")], std::stoi(row[t.column("horizon")])}]
             [std::stoi(row[t.column("episode")])] = std::stod(row[t.column("mse")]);
    }
    for (auto& [k, s] : per_run) errors[{it->second, k.first, k.second}].push_back(std::move(s));
  }

  const fs::path agg = out / "aggregate";
  const std::vector<std::string> arm{"domain", "target_kind", "horizon", "k_samples",
                                     "critic_step_size"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> h = arm;
    h.insert(h.end(), extra.begin(), extra.end());
    return h;
  };
  auto prefix = [](const RunMeta& m) {
    return std::vector<std::string>{m.domain, m.target_kind, m.horizon, m.k_samples,
                                    m.critic_step_size};
  };

  CsvWriter returns_mean(agg / "returns_mean.csv",
                         with({"episode", "mean_return", "se_return", "n"}));
  CsvWriter return_auc(agg / "return_auc.csv", with({"mean_auc", "se_auc", "n"}));
  for (const auto& [m, runs] : returns) {
    write_series_rows(returns_mean, prefix(m), runs);
    write_auc_row(return_auc, prefix(m), runs);
  }

  CsvWriter errors_mean(agg / "errors_mean.csv",
                        with({"model_kind", "model_horizon", "episode", "mean_mse", "se_mse", "n"}));
  CsvWriter error_auc(agg / "error_auc.csv",
                      with({"model_kind", "model_horizon", "mean_auc", "se_auc", "n"}));
  for (const auto& [key, runs] : errors) {
    auto p = prefix(std::get<0>(key));
    p.push_back(std::get<1>(key));
    p.push_back(std::to_string(std::get<2>(key)));
    write_series_rows(errors_mean, p, runs);
    write_auc_row(error_auc, p, runs);
  }

  // Best critic step size per arm by return AUC of the seed mean.
  CsvWriter best(agg / "best_step_size.csv",
                 {"domain", "target_kind", "horizon", "k_samples", "critic_step_size", "mean_auc"});
  std::map<std::vector<std::string>, std::pair<std::string, double>> best_by_arm;
  for (const auto& [m, runs] : returns) {
    std::vector<double> aucs;
    for (const auto& s : runs) {
      std::vector<double> v;
      for (const auto& [e, x] : s) v.push_back(x);
      aucs.push_back(auc(v));
    }
    const double mean = mean_se(aucs).mean;
    const std::vector<std::string> arm_key{m.domain, m.target_kind, m.horizon, m.k_samples};
    auto it = best_by_arm.find(arm_key);
    if (it == best_by_arm.end() || mean > it->second.second) {
      best_by_arm[arm_key] = {m.critic_step_size, mean};
    }
  }
  for (const auto& [k, v] : best_by_arm) {
    for (const auto& f : k) best << f;
    best << v.first << v.second;
    best.end_row();
  }

  returns_mean.close();
  return_auc.close();
  errors_mean.close();
  error_auc.close();
  best.close();
}

void write_manifest(const fs::path& out, const ExperimentConfig& config,
                    const std::vector<Cell>& cells, const ExperimentSummary& summary) {
  const std::string canonical = config.canonical_text();
  nlohmann::ordered_json j;
  j["config_hash"] = git_blob_hash(canonical);
  j["config"] = canonical;
  j["domain"] = config.domain;
  j["bootstrap_exponent"] = to_string(config.bootstrap);
  j["seed_count"] = config.seeds.size();
  j["seeds"] = config.seeds;
  j["episodes"] = config.episodes;
  j["cell_count"] = cells.size();
  j["completed"] = summary.run_ids;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& f : summary.failures) failures.push_back({{"run_id", f.run_id}, {"error", f.error}});
  j["failures"] = failures;
  std::ofstream file(out / "manifest.json", std::ios::binary | std::ios::trunc);
  file << j.dump(2) << '\n';
  if (!file) throw std::runtime_error("cannot write manifest.json");
}

std::vector<ErrorRecord> evaluate_checkpoint(const ExperimentConfig& config,
                                             const fs::path& checkpoint, int episodes,
                                             std::uint64_t seed, int max_horizon) {
  if (config.model.normalize_inputs) {
    throw std::invalid_argument("eval-model: checkpoints do not carry input normalizer state");
  }
  const auto env = envs::make_environment(config.domain, config.hyper.max_episode_steps);
  const envs::EnvSpec spec = env->spec();
  auto load_one = [](const fs::path& p) {
    auto nets = nn::load_mlps(p);
    if (nets.size() != 1) throw std::runtime_error(p.string() + ": expected one network");
    return nets.front();
  };

  agent::Actor actor(spec.state_dim, spec.action_count,
                     {config.hyper.actor_hidden_layers, config.hyper.actor_hidden_units,
                      config.model.activation},
                     {}, 0);
  actor.net() = load_one(checkpoint / "actor.msnn");

  models::ModelOptions options = config.model;
  options.hidden_layers = config.hyper.transition_hidden_layers;
  options.hidden_units = config.hyper.transition_hidden_units;
  std::optional<models::OneStepModel> one_step;
  if (fs::exists(checkpoint / "one_step.msnn")) {
    one_step.emplace(spec.state_dim, spec.action_count, options, 0);
    one_step->network().net() = load_one(checkpoint / "one_step.msnn");
  }
  std::optional<models::MultiStepModel> multi_step;
  if (fs::exists(checkpoint / "multi_step.msnn")) {
    auto nets = nn::load_mlps(checkpoint / "multi_step.msnn");
    multi_step.emplace(spec.state_dim, spec.action_count, static_cast<int>(nets.size()), options,
                       0);
    for (std::size_t l = 0; l < nets.size(); ++l) {
      multi_step->network(static_cast<int>(l) + 1).net() = std::move(nets[l]);
    }
  }
  if (!one_step && !multi_step) {
    throw std::runtime_error("eval-model: no transition model in " + checkpoint.string());
  }

  Rng rng = derived_rng(seed, 1);
  std::vector<ErrorRecord> out;
  for (int e = 0; e < episodes; ++e) {
    const Episode episode = agent::run_episode(*env, actor, rng);
    auto rows = model_errors(e, episode, one_step ? &*one_step : nullptr,
                             multi_step ? &*multi_step : nullptr, max_horizon);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace mstep::harness

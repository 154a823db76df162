// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Pass criterion names as arguments to run a subset.

#include "gradient_check.hpp"
#include "reference_dynamics.hpp"
#include "toy_domain.hpp"

#include "mstep/envs/acrobot.hpp"
#include "mstep/envs/cartpole.hpp"
#include "mstep/harness/csv.hpp"
#include "mstep/harness/experiment.hpp"
#include "mstep/harness/stats.hpp"
#include "mstep/models/true_dynamics.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace mstep;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

fs::path output_root() {
  const char* env = std::getenv("MSTEP_ACCEPTANCE_OUT");
  return env != nullptr ? fs::path(env) : fs::temp_directory_path() / "mstep_acceptance";
}

// ---------------------------------------------------------------------------

Verdict gradient_fidelity() {
  const std::vector<std::pair<std::string, std::function<oracle::ProbeSummary()>>> heads = {
      {"transition mse", [] { return oracle::transition_head_probes(100, 101); }},
      {"reward mse", [] { return oracle::reward_head_probes(100, 102); }},
      {"critic mse", [] { return oracle::critic_head_probes(100, 103); }},
      {"softmax policy", [] { return oracle::softmax_objective_probes(100, 104); }},
      {"all-actions actor", [] { return oracle::all_actions_probes(100, 105); }},
  };
  Verdict v{true, ""};
  for (const auto& [name, run] : heads) {
    const auto s = run();
    v.pass &= s.probes >= 100 && s.max_relative_error < 1e-4;
    v.detail += fmt("%s%s max rel err %.2e over %d probes", v.detail.empty() ? "" : "; ",
                    name.c_str(), s.max_relative_error, s.probes);
  }
  return v;
}

Verdict rollout_oracle() {
  oracle::ToyMultiStep model;
  model.n = 3;
  rollout::RolloutConfig cfg;
  cfg.horizon = 3;
  cfg.samples = 100000;
  cfg.gamma = 0.9;
  Rng rng(2024);
  State s0(1);
  s0[0] = 0.3;
  const auto est = rollout::estimate_target(s0, 1, oracle::ToyPolicy{}, oracle::ToyQ{},
                                            oracle::ToyReward{}, model, cfg, rng);
  const double exact = oracle::toy_exact_target(0.3, 1, 3, 0.9, cfg.bootstrap);
  const double z = std::abs(est.value - exact) / est.std_error;
  return {z < 3.0, fmt("estimate %.6f, exact %.6f (8 sequences), |z| = %.2f standard errors",
                       est.value, exact, z)};
}

Verdict architecture_congruence() {
  double worst_prediction = 0.0;
  double worst_target = 0.0;
  Rng rng(7);
  // Shared weights: horizon-1 network of the multi-step model = one-step model.
  for (int dim : {4, 6}) {
    const int actions = dim == 4 ? 2 : 3;
    models::OneStepModel one(dim, actions, {}, 31);
    models::MultiStepModel multi(dim, actions, 3, {}, 57);
    multi.network(1).net() = one.network().net();
    std::normal_distribution<double> n;
    for (int i = 0; i < 1000; ++i) {
      State s(dim);
      for (int k = 0; k < dim; ++k) s[k] = n(rng);
      const int a = i % actions;
      const std::vector<int> seq{a};
      worst_prediction =
          std::max(worst_prediction, (one.predict(s, a) - multi.predict(s, seq)).cwiseAbs().maxCoeff());
    }
  }
  // n = 1 targets on true models with the standard exponent.
  for (const char* name : {"cartpole", "acrobot"}) {
    const auto env = envs::make_environment(name);
    const models::EnvOneStep one(*env);
    const models::EnvMultiStep multi(*env, 1);
    const models::EnvReward reward(*env);
    const int actions = env->spec().action_count;
    agent::Actor policy(env->spec().state_dim, actions, {}, {}, 5);
    agent::Critic critic(env->spec().state_dim, actions, {}, {}, 6);
    rollout::RolloutConfig cfg;
    cfg.bootstrap = rollout::BootstrapExponent::standard;
    Rng env_rng(3);
    for (int i = 0; i < 1000; ++i) {
      const State s = env->reset(env_rng);
      const int a = i % actions;
      const auto step = env->step(s, a);
      const Transition tr{s, a, step.reward, step.next_state, false};
      Rng r1(i), r2(i), r3(i);
      const auto q = critic.online();
      const double td0 = rollout::td0_target(tr, q, policy, cfg.gamma, r1);
      const double g1 = rollout::one_step_model_target(s, a, policy, q, reward, one, cfg, r2).value;
      const double gm = rollout::estimate_target(s, a, policy, q, reward, multi, cfg, r3).value;
      worst_target = std::max({worst_target, std::abs(td0 - g1), std::abs(td0 - gm)});
    }
  }
  return {worst_prediction <= 1e-12 && worst_target <= 1e-12,
          fmt("max |one-step - multi-step h1| = %.1e over 2000 inputs; max n=1 target gap = %.1e "
              "over 2000 transitions",
              worst_prediction, worst_target)};
}

Verdict env_fidelity() {
  double cart = 0.0;
  double acro = 0.0;
  int flag_mismatch = 0;
  const envs::CartPole cp;
  const envs::Acrobot ab;
  Rng rng(99);
  std::uniform_real_distribution<double> pos(-2.4, 2.4), vel(-3.0, 3.0), ang(-0.25, 0.25);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> v1(-4 * std::numbers::pi, 4 * std::numbers::pi);
  std::uniform_real_distribution<double> v2(-9 * std::numbers::pi, 9 * std::numbers::pi);
  for (int i = 0; i < 1000; ++i) {
    const std::array<double, 4> s{pos(rng), vel(rng), ang(rng), vel(rng)};
    const auto ref = oracle::reference::cartpole_step(s, i % 2);
    const auto got = cp.step(Eigen::Vector4d(s[0], s[1], s[2], s[3]), i % 2);
    for (int k = 0; k < 4; ++k) cart = std::max(cart, std::abs(got.next_state[k] - ref.state[k]));
    flag_mismatch += got.done != ref.done;

    const std::array<double, 4> j{angle(rng), angle(rng), v1(rng), v2(rng)};
    const auto aref = oracle::reference::acrobot_step(j, i % 3);
    const auto agot = ab.step(envs::Acrobot::observe(j), i % 3);
    for (int k = 0; k < 6; ++k) {
      acro = std::max(acro, std::abs(agot.next_state[k] - aref.observation[k]));
    }
    flag_mismatch += agot.done != aref.terminal || agot.reward != aref.reward;
  }
  State hang = envs::Acrobot::observe({0, 0, 0, 0});
  const State start = hang;
  for (int t = 0; t < 500; ++t) hang = ab.step(hang, 1).next_state;
  const double drift = (hang - start).cwiseAbs().maxCoeff();
  return {cart <= 1e-12 && acro <= 1e-12 && flag_mismatch == 0 && drift <= 1e-9,
          fmt("cartpole max dev %.1e, acrobot max dev %.1e over 1000 probes each, %d flag "
              "mismatches; hanging equilibrium drift %.1e after 500 steps",
              cart, acro, flag_mismatch, drift)};
}

// ---------------------------------------------------------------------------

harness::ExperimentConfig cartpole_config() {
  harness::ExperimentConfig c = harness::default_config("cartpole");
  c.seeds.clear();
  for (std::uint64_t s = 0; s < 20; ++s) c.seeds.push_back(s);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  harness::ExperimentConfig c = cartpole_config();
  c.target_kinds = {agent::TargetKind::model_free_td0, agent::TargetKind::one_step_model,
                    agent::TargetKind::multi_step_model};
  c.horizons = {3};
  c.seeds = {11, 12};
  c.episodes = 15;
  c.error_horizon = 4;
  const fs::path a = output_root() / "determinism_a";
  const fs::path b = output_root() / "determinism_b";
  fs::remove_all(a);
  fs::remove_all(b);
  c.output_dir = a;
  c.workers = 1;
  harness::run_experiment(c);
  c.output_dir = b;
  c.workers = 3;
  harness::run_experiment(c);
  int files = 0;
  int differing = 0;
  for (const char* sub : {"runs", "errors", "errors_by_dim", "losses", "events", "aggregate"}) {
    for (const auto& f : fs::directory_iterator(a / sub)) {
      ++files;
      differing += slurp(f.path()) != slurp(b / sub / f.path().filename());
    }
  }
  differing += slurp(a / "manifest.json") != slurp(b / "manifest.json");
  return {files > 0 && differing == 0,
          fmt("%d raw/aggregate files plus manifest compared across two executions (1 and 3 "
              "workers), %d differ",
              files, differing)};
}

Verdict compounding_error() {
  harness::ExperimentConfig c = cartpole_config();
  c.target_kinds = {agent::TargetKind::model_free_td0};
  c.error_horizon = 10;
  c.episodes = 100;
  int wins = 0;
  std::string per_seed;
  for (std::uint64_t seed : c.seeds) {
    harness::Cell cell{agent::TargetKind::model_free_td0, 0, 0, c.critic_step_sizes.front(), seed};
    agent::Agent agent(harness::agent_config(c, cell));
    for (int e = 0; e < c.episodes; ++e) agent.train_episode();
    // Fresh held-out episodes from the current policy; models are frozen.
    Rng eval_rng = derived_rng(seed, 77);
    std::vector<double> one, multi;
    for (int k = 0; k < 5; ++k) {
      const Episode ep = agent::run_episode(agent.environment(), agent.actor(), eval_rng);
      for (const auto& r : harness::evaluate_models(k, ep, agent.models(), 10)) {
        if (r.horizon != 10) continue;
        (r.model_kind == "one_step" ? one : multi).push_back(r.mse);
      }
    }
    const double m1 = harness::mean_se(one).mean;
    const double mm = harness::mean_se(multi).mean;
    wins += !multi.empty() && mm < m1;
    per_seed += fmt("%s%.3g/%.3g", per_seed.empty() ? "" : " ", mm, m1);
  }
  const double rate = wins / static_cast<double>(c.seeds.size());
  return {rate >= 0.8, fmt("multi-step below one-step at h=10 in %d/%zu seeds (%.0f%%); "
                           "multi/one MSE per seed: %s",
                           wins, c.seeds.size(), 100 * rate, per_seed.c_str())};
}

// Critic step sizes per arm, picked from the candidate list by a 3-seed,
// 200-episode pilot sweep (seeds 0-2) on mean return AUC.
const std::map<int, double> kPlanningStepSize = {{0, 0.05}, {2, 0.1}, {3, 0.05}, {5, 0.1}};

Verdict planning_benefit() {
  harness::ExperimentConfig c = cartpole_config();
  c.horizons = {2, 3, 5};
  c.k_samples = 5;
  c.episodes = 500;
  const char* workers = std::getenv("MSTEP_WORKERS");
  c.workers = workers != nullptr ? std::max(1, std::atoi(workers)) : 1;
  const fs::path root = output_root() / "planning";
  fs::remove_all(root);
  std::vector<harness::Cell> cells;
  for (const auto& [horizon, step] : kPlanningStepSize) {
    harness::ExperimentConfig arm = c;
    arm.target_kinds = {horizon == 0 ? agent::TargetKind::model_free_td0
                                     : agent::TargetKind::multi_step_model};
    arm.horizons = {std::max(horizon, 1)};
    arm.critic_step_sizes = {step};
    arm.output_dir = root / (horizon == 0 ? "td0" : "n" + std::to_string(horizon));
    const auto summary = harness::run_experiment(arm);
    if (!summary.failures.empty()) {
      return {false, fmt("%zu cells failed, first: %s", summary.failures.size(),
                         summary.failures.front().error.c_str())};
    }
    for (const auto& cell : harness::expand_grid(arm)) cells.push_back(cell);
  }
  auto run_path = [&](const harness::Cell& cell) {
    const fs::path dir = root / (cell.horizon == 0 ? "td0" : "n" + std::to_string(cell.horizon));
    return dir / "runs" / (cell.run_id(c.domain) + ".csv");
  };
  // Per-seed return AUC per arm.
  std::map<int, std::map<std::uint64_t, double>> auc_by_horizon;
  for (const auto& cell : cells) {
    const auto t = harness::read_csv(run_path(cell));
    std::vector<double> returns;
    for (const auto& row : t.rows) returns.push_back(std::stod(row[t.column("return")]));
    auc_by_horizon[cell.horizon][cell.seed] = harness::auc(returns);
  }
  auto seed_mean = [&](int h) {
    double s = 0.0;
    for (const auto& [seed, v] : auc_by_horizon[h]) s += v;
    return s / static_cast<double>(auc_by_horizon[h].size());
  };
  int best = 2;
  for (int h : c.horizons) best = seed_mean(h) > seed_mean(best) ? h : best;
  std::vector<double> multi, td0;
  for (std::uint64_t seed : c.seeds) {
    multi.push_back(auc_by_horizon[best][seed]);
    td0.push_back(auc_by_horizon[0][seed]);
  }
  const double rate = harness::win_rate(multi, td0);
  const double a2 = seed_mean(2), a3 = seed_mean(3), a5 = seed_mean(5);
  const bool inverted_u = a3 >= a2 && a3 >= a5;
  return {rate >= 0.7,
          fmt("best n = %d beats TD(0) return-AUC in %.0f%% of %zu paired seeds; seed-mean AUC "
              "td0 %.1f, n=2 %.1f, n=3 %.1f, n=5 %.1f (inverted-U over n: %s, descriptive)",
              best, 100 * rate, c.seeds.size(), seed_mean(0), a2, a3, a5,
              inverted_u ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient_fidelity", gradient_fidelity},
      {"rollout_oracle", rollout_oracle},
      {"architecture_congruence", architecture_congruence},
      {"env_fidelity", env_fidelity},
      {"determinism", determinism},
      {"compounding_error", compounding_error},
      {"planning_benefit", planning_benefit},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.0fs]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}

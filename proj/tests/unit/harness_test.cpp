#include "mstep/envs/environment.hpp"
#include "mstep/harness/cli.hpp"
#include "mstep/harness/config.hpp"
#include "mstep/harness/csv.hpp"
#include "mstep/harness/experiment.hpp"
#include "mstep/harness/prediction_error.hpp"
#include "mstep/harness/stats.hpp"
#include "mstep/models/models.hpp"
#include "mstep/models/true_dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mstep;
using namespace mstep::harness;
namespace fs = std::filesystem;

namespace {

struct PlusOne final : models::OneStepPredictor {
  State predict(const State& s, int) const override { return s.array() + 1.0; }
};

Episode scalar_episode(const std::vector<double>& xs) {
  Episode e;
  for (double x : xs) {
    State s(1);
    s[0] = x;
    e.states.push_back(s);
  }
  for (std::size_t t = 0; t + 1 < xs.size(); ++t) {
    e.actions.push_back(1);
    e.rewards.push_back(0.0);
  }
  return e;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mstep_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* tiny_config = R"(
[experiment]
domain = cartpole
target kinds = td0, multi_step
horizons = 2, 3
k samples = 2
seeds = 4-5
episodes = 3
error horizon = 3

[cartpole]
critic network: batches of update per episode = 2
transition functions: batches of update per episode = 2
transition functions: batch size = 16
reward model: batches of update per episode = 2
reward model: batch size = 16
)";

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "mstep");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

}  // namespace

TEST(PredictionError, HandComputedToyEpisode) {
  const Episode e = scalar_episode({0, 1, 3, 2});
  const auto errors = one_step_prediction_error(PlusOne{}, e, {1, 2, 3, 4});
  ASSERT_EQ(errors.size(), 4u);
  EXPECT_DOUBLE_EQ(*errors[0].mse, (0.0 + 1.0 + 4.0) / 3.0);
  EXPECT_DOUBLE_EQ(*errors[1].mse, (1.0 + 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(*errors[2].mse, 1.0);
  EXPECT_FALSE(errors[3].mse.has_value());
  EXPECT_EQ(errors[0].tuples, 3);
}

TEST(PredictionError, TrueDynamicsGiveZero) {
  const auto env = envs::make_environment("acrobot", 40);
  const models::EnvOneStep one(*env);
  const models::EnvMultiStep multi(*env, 6);
  Rng rng(2);
  Episode ep;
  ep.states.push_back(env->reset(rng));
  for (int t = 0; t < 40; ++t) {
    const int a = t % 3;
    ep.actions.push_back(a);
    auto r = env->step(ep.states.back(), a);
    ep.rewards.push_back(r.reward);
    ep.states.push_back(r.next_state);
  }
  for (const auto& e : one_step_prediction_error(one, ep, {1, 2, 3, 4, 5, 6})) EXPECT_EQ(*e.mse, 0.0);
  for (const auto& e : multi_step_prediction_error(multi, ep, {1, 2, 3, 4, 5, 6})) {
    EXPECT_EQ(*e.mse, 0.0);
  }
}

TEST(PredictionError, CongruentHorizonOneErrorsMatch) {
  models::OneStepModel one(1, 2, {}, 5);
  models::MultiStepModel multi(1, 2, 2, {}, 8);
  multi.network(1).net() = one.network().net();
  const Episode e = scalar_episode({0.1, 0.5, -0.2, 0.7, 0.3});
  const auto a = one_step_prediction_error(one, e, {1});
  const auto b = multi_step_prediction_error(multi, e, {1});
  EXPECT_EQ(*a[0].mse, *b[0].mse);
  EXPECT_EQ(a[0].by_dim, b[0].by_dim);
}

TEST(Stats, AucExamples) {
  EXPECT_DOUBLE_EQ(auc({4.0, 4.0, 4.0}), 4.0);
  EXPECT_DOUBLE_EQ(auc({0.0, 1.0}), 0.5);
  EXPECT_THROW(auc({}), std::invalid_argument);
}

TEST(Stats, AucMatchesTrapezoidRuleOnSmoothSeries) {
  // Normalized area of f(x) = 1 + sin(3x) + x^2 on [0, 1] sampled at 500 points.
  const int n = 500;
  std::vector<double> ys;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    ys.push_back(1.0 + std::sin(3.0 * x) + x * x);
  }
  double trapezoid = 0.0;
  for (int i = 0; i + 1 < n; ++i) trapezoid += 0.5 * (ys[i] + ys[i + 1]) / (n - 1);
  EXPECT_LT(std::abs(auc(ys) - trapezoid) / trapezoid, 0.01);
}

TEST(Stats, MeanAndStandardError) {
  const MeanSe m = mean_se({1.0, 2.0, 3.0, 6.0});
  EXPECT_DOUBLE_EQ(m.mean, 3.0);
  // Sample sd sqrt(14 / 3), divided by sqrt(4).
  EXPECT_NEAR(m.standard_error, std::sqrt(14.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(mean_se({5.0}).standard_error, 0.0);
  EXPECT_DOUBLE_EQ(win_rate({1, 2, 3}, {0, 2, 4}), 1.0 / 3.0);
}

TEST(Csv, WriterRoundTripsDoubles) {
  const fs::path dir = scratch("csv");
  CsvWriter w(dir / "x.csv", {"a", "b"});
  w << 0.1 << 1.0 / 3.0;
  w.end_row();
  w << "x";
  EXPECT_THROW(w.end_row(), std::logic_error);
  w << 2;
  w.end_row();
  w.close();
  const CsvTable t = read_csv(dir / "x.csv");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(std::stod(t.rows[0][1]), 1.0 / 3.0);
  EXPECT_EQ(std::stod(t.rows[0][0]), 0.1);
  EXPECT_EQ(t.column("b"), 1);
}

TEST(Config, GitBlobHash) {
  // `printf 'hello\n' | git hash-object --stdin`
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Config, ParsesSectionsAndOverrides) {
  const auto c = parse_config(tiny_config, {{"episodes", "7"}});
  EXPECT_EQ(c.episodes, 7);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(c.horizons, (std::vector<int>{2, 3}));
  EXPECT_EQ(c.hyper.critic_batches, 2);
  EXPECT_EQ(c.hyper.transition_batch_size, 16);
  EXPECT_EQ(c.hyper.gamma, 0.9999);
  EXPECT_EQ(c.critic_step_sizes, (std::vector<double>{0.01}));
}

TEST(Config, TuneUsesTheCandidateList) {
  const auto c = parse_config("[experiment]\ntune critic step size = true\n");
  EXPECT_EQ(c.critic_step_sizes, (std::vector<double>{0.1, 0.05, 0.025, 0.01}));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("[experiment]\nlearning rate = 3\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("[cartpole]\ncritic step = 3\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("[pendulum]\nmax episode steps = 5\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("[experiment]\nhorizons = 0\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("[experiment]\nseeds = 1, 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("[experiment]\nepisodes = many\n"), std::invalid_argument);
}

TEST(Config, CanonicalTextIsStableAndReparses) {
  const auto c = parse_config(tiny_config);
  const auto again = parse_config(c.canonical_text());
  EXPECT_EQ(c.canonical_text(), again.canonical_text());
}

TEST(Experiment, GridCounting) {
  auto c = parse_config(tiny_config);
  c.target_kinds = {agent::TargetKind::multi_step_model};
  EXPECT_EQ(expand_grid(c).size(), 4u);
  c.target_kinds = {agent::TargetKind::model_free_td0, agent::TargetKind::multi_step_model};
  EXPECT_EQ(expand_grid(c).size(), 6u);  // model-free arm runs once per seed
}

TEST(Experiment, WritesRawFilesAggregatesAndManifest) {
  auto c = parse_config(tiny_config);
  c.target_kinds = {agent::TargetKind::multi_step_model};
  c.output_dir = scratch("experiment");
  const auto summary = run_experiment(c);
  EXPECT_TRUE(summary.failures.empty());
  int raw = 0;
  for (const auto& f : fs::directory_iterator(c.output_dir / "runs")) raw += f.is_regular_file();
  EXPECT_EQ(raw, 4);
  EXPECT_TRUE(fs::exists(c.output_dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(c.output_dir / "aggregate" / "returns_mean.csv"));

  // Aggregate mean of the two seeds equals the hand average of their curves.
  const auto a = read_csv(c.output_dir / "runs" / (expand_grid(c)[0].run_id("cartpole") + ".csv"));
  const auto b = read_csv(c.output_dir / "runs" / (expand_grid(c)[1].run_id("cartpole") + ".csv"));
  const auto agg = read_csv(c.output_dir / "aggregate" / "returns_mean.csv");
  int checked = 0;
  for (const auto& row : agg.rows) {
    if (row[agg.column("horizon")] != "2") continue;
    const int e = std::stoi(row[agg.column("episode")]);
    const double hand = (std::stod(a.rows[e][a.column("return")]) +
                         std::stod(b.rows[e][b.column("return")])) / 2.0;
    EXPECT_DOUBLE_EQ(std::stod(row[agg.column("mean_return")]), hand);
    ++checked;
  }
  EXPECT_EQ(checked, 3);

  // Every episode evaluates models before any training on it.
  const auto events = read_csv(c.output_dir / "events" / (expand_grid(c)[0].run_id("cartpole") + ".csv"));
  int last_eval = -1;
  for (const auto& row : events.rows) {
    const int e = std::stoi(row[1]);
    if (row[2] == "evaluate_models") last_eval = e;
    if (row[2] == "train_models" || row[2] == "critic_update") EXPECT_EQ(last_eval, e);
  }

  const auto errors = read_csv(c.output_dir / "errors" / (expand_grid(c)[0].run_id("cartpole") + ".csv"));
  for (const auto& row : errors.rows) {
    const double mse = std::stod(row[errors.column("mse")]);
    EXPECT_TRUE(std::isfinite(mse));
    EXPECT_GE(mse, 0.0);
  }
}

TEST(Experiment, RerunIsByteIdentical) {
  auto c = parse_config(tiny_config);
  c.seeds = {9};
  const fs::path first = scratch("det_a");
  c.output_dir = first;
  run_experiment(c);
  c.output_dir = scratch("det_b");
  c.workers = 2;
  run_experiment(c);
  for (const char* sub : {"runs", "errors", "errors_by_dim", "losses", "events", "aggregate"}) {
    for (const auto& f : fs::directory_iterator(first / sub)) {
      const fs::path other = fs::path(c.output_dir) / sub / f.path().filename();
      EXPECT_EQ(read_file(f.path()), read_file(other)) << other;
    }
  }
}

TEST(Experiment, FailedCellIsRecordedAndOthersProceed) {
  auto c = parse_config(tiny_config);
  c.target_kinds = {agent::TargetKind::multi_step_model};
  c.horizons = {2};
  c.hyper.transition_step_size = 1e300;  // blows up the first model update
  c.critic_step_sizes = {0.01};
  c.output_dir = scratch("failure");
  const auto summary = run_experiment(c);
  EXPECT_EQ(summary.failures.size(), 2u);
  EXPECT_TRUE(summary.run_ids.empty());
  const std::string manifest = read_file(c.output_dir / "manifest.json");
  EXPECT_NE(manifest.find("\"failures\""), std::string::npos);
}

TEST(Cli, ValidationAndUsageErrorsExitTwo) {
  std::string err;
  EXPECT_EQ(cli({"train", "--horizon", "0", "--out", scratch("cli0").string()}, &err), 2);
  EXPECT_NE(err.find("\"error\""), std::string::npos);
  EXPECT_EQ(cli({"train", "--bogus"}, &err), 2);
  EXPECT_EQ(cli({"sweep", "--config", "/nonexistent.cfg"}, &err), 2);
  EXPECT_EQ(cli({"sweep"}, &err), 2);
  EXPECT_EQ(cli({}, &err), 2);
}

TEST(Cli, SweepPopulatesOutputAndTrainIsRepeatable) {
  const fs::path cfg = scratch("cli_cfg.cfg");
  std::ofstream(cfg) << tiny_config;
  const fs::path out = scratch("cli_sweep");
  ASSERT_EQ(cli({"sweep", "--config", cfg.string(), "--out", out.string(), "--seed", "1"}), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_FALSE(fs::is_empty(out / "runs"));

  const fs::path t1 = scratch("cli_train1"), t2 = scratch("cli_train2");
  for (const auto& out_dir : {t1, t2}) {
    ASSERT_EQ(cli({"train", "--config", cfg.string(), "--seed", "7", "--target-kind", "multi_step",
                   "--out", out_dir.string()}),
              0);
  }
  for (const auto& f : fs::directory_iterator(t1 / "runs")) {
    EXPECT_EQ(read_file(f.path()), read_file(t2 / "runs" / f.path().filename()));
  }
  EXPECT_EQ(read_file(t1 / "manifest.json"), read_file(t2 / "manifest.json"));
  ASSERT_EQ(cli({"report", "--out", t1.string()}), 0);
}

TEST(Cli, EvalModelOnCheckpoint) {
  std::string text = tiny_config;
  text.replace(text.find("[experiment]\n"), 13, "[experiment]\nsave checkpoints = true\n");
  const fs::path cfg = scratch("cli_ckpt.cfg");
  std::ofstream(cfg) << text;
  const fs::path out = scratch("cli_ckpt");
  std::string err;
  ASSERT_EQ(cli({"train", "--config", cfg.string(), "--target-kind", "multi_step", "--out",
                 out.string()}, &err), 0) << err;
  const auto cell = fs::directory_iterator(out / "checkpoints")->path();
  EXPECT_TRUE(fs::exists(cell / "actor.msnn"));
  EXPECT_TRUE(fs::exists(cell / "multi_step.msnn"));
  const fs::path eval_out = scratch("cli_eval");
  ASSERT_EQ(cli({"eval-model", "--config", cfg.string(), "--checkpoint", cell.string(),
                 "--episodes", "2", "--out", eval_out.string()}, &err), 0) << err;
  const auto t = read_csv(eval_out / "errors" / (cell.filename().string() + ".csv"));
  EXPECT_FALSE(t.rows.empty());
}

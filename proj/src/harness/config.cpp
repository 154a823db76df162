#include "mstep/harness/config.hpp"

#include "mstep/harness/csv.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/sha.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mstep::harness {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), '[', ' ');
  std::replace(cleaned.begin(), cleaned.end(), ']', ' ');
  std::vector<std::string> out;
  std::stringstream ss(cleaned);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  return static_cast<int>(to_integer(key, v));
}

// "1 episode", "1 episodes" and "1" all mean 1.
int leading_int(const std::string& key, const std::string& v) {
  std::stringstream ss(v);
  int n = 0;
  std::string unit;
  if (!(ss >> n)) throw std::invalid_argument("config: '" + key + "' expects a count");
  ss >> unit;
  if (!unit.empty() && unit != "episode" && unit != "episodes") {
    throw std::invalid_argument("config: '" + key + "' has unknown unit '" + unit + "'");
  }
  return n;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("config: '" + key + "' expects true/false, got '" + v + "'");
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt(items[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

// Domain-section keys: the row names of the control-domain hyperparameter
// table, plus the episode cap.
const std::map<std::string, Setter>& domain_keys() {
  static const std::map<std::string, Setter> keys = {
      {"gamma (discount rate)",
       [](ExperimentConfig& c, const std::string& v) { c.hyper.gamma = to_double("gamma", v); }},
      {"critic network: hidden layers",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.critic_hidden_layers = to_int("critic hidden layers", v);
       }},
      {"critic network: neurons per hidden layer",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.critic_hidden_units = to_int("critic neurons", v);
       }},
      {"critic network: step size (tuned from the list)",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.critic_step_sizes.clear();
         for (const auto& item : split_list(v)) {
           c.hyper.critic_step_sizes.push_back(to_double("critic step size", item));
         }
       }},
      {"critic network: batches of update per episode",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.critic_batches = to_int("critic batches", v);
       }},
      {"critic network: batch size",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.critic_batch_size = to_int("critic batch size", v);
       }},
      {"actor network: hidden layers",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.actor_hidden_layers = to_int("actor hidden layers", v);
       }},
      {"actor network: neurons per hidden layer",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.actor_hidden_units = to_int("actor neurons", v);
       }},
      {"actor network: step size",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.actor_step_size = to_double("actor step size", v);
       }},
      {"actor network: batches of update per episode",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.actor_batches = to_int("actor batches", v);
       }},
      {"actor network: batch size",
       [](ExperimentConfig&, const std::string& v) {
         if (trim(v) != "length of episode") {
           throw std::invalid_argument("config: actor batch size is always 'length of episode'");
         }
       }},
      {"transition functions: hidden layers",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.transition_hidden_layers = to_int("transition hidden layers", v);
       }},
      {"transition functions: neurons per hidden layer",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.transition_hidden_units = to_int("transition neurons", v);
       }},
      {"transition functions: step size (optimized for one-step model)",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.transition_step_size = to_double("transition step size", v);
       }},
      {"transition functions: batches of update per episode",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.transition_batches = to_int("transition batches", v);
       }},
      {"transition functions: batch size",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.transition_batch_size = to_int("transition batch size", v);
       }},
      {"reward model: hidden layers",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.reward_hidden_layers = to_int("reward hidden layers", v);
       }},
      {"reward model: neurons per hidden layer",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.reward_hidden_units = to_int("reward neurons", v);
       }},
      {"reward model: step size",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.reward_step_size = to_double("reward step size", v);
       }},
      {"reward model: batches of update per episode",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.reward_batches = to_int("reward batches", v);
       }},
      {"reward model: batch size",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.reward_batch_size = to_int("reward batch size", v);
       }},
      {"maximum buffer size",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.buffer_size = to_int("maximum buffer size", v);
       }},
      {"target network update frequency",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.target_update_episodes = leading_int("target network update frequency", v);
       }},
      {"max episode steps",
       [](ExperimentConfig& c, const std::string& v) {
         c.hyper.max_episode_steps = to_int("max episode steps", v);
       }},
  };
  return keys;
}

const std::map<std::string, Setter>& experiment_keys() {
  static const std::map<std::string, Setter> keys = {
      {"domain", [](ExperimentConfig&, const std::string&) {}},  // handled first
      {"target kinds",
       [](ExperimentConfig& c, const std::string& v) {
         c.target_kinds.clear();
         for (const auto& item : split_list(v)) {
           c.target_kinds.push_back(agent::parse_target_kind(item));
         }
       }},
      {"horizons",
       [](ExperimentConfig& c, const std::string& v) {
         c.horizons.clear();
         for (const auto& item : split_list(v)) c.horizons.push_back(to_int("horizons", item));
       }},
      {"k samples", [](ExperimentConfig& c, const std::string& v) {
         c.k_samples = to_int("k samples", v);
       }},
      {"seeds", [](ExperimentConfig& c, const std::string& v) { c.seeds = parse_seed_list(v); }},
      {"episodes", [](ExperimentConfig& c, const std::string& v) {
         c.episodes = to_int("episodes", v);
       }},
      {"critic step size",
       [](ExperimentConfig& c, const std::string& v) {
         c.critic_step_sizes.clear();
         for (const auto& item : split_list(v)) {
           c.critic_step_sizes.push_back(to_double("critic step size", item));
         }
       }},
      {"tune critic step size",
       [](ExperimentConfig& c, const std::string& v) {
         if (to_bool("tune critic step size", v)) c.critic_step_sizes = c.hyper.critic_step_sizes;
       }},
      {"bootstrap exponent",
       [](ExperimentConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "paper") {
           c.bootstrap = rollout::BootstrapExponent::paper;
         } else if (t == "standard") {
           c.bootstrap = rollout::BootstrapExponent::standard;
         } else {
           throw std::invalid_argument("config: bootstrap exponent is 'paper' or 'standard'");
         }
       }},
      {"error horizon", [](ExperimentConfig& c, const std::string& v) {
         c.error_horizon = to_int("error horizon", v);
       }},
      {"prediction target",
       [](ExperimentConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "absolute") {
           c.model.target = models::PredictionTarget::absolute;
         } else if (t == "delta") {
           c.model.target = models::PredictionTarget::delta;
         } else {
           throw std::invalid_argument("config: prediction target is 'absolute' or 'delta'");
         }
       }},
      {"normalize inputs", [](ExperimentConfig& c, const std::string& v) {
         c.model.normalize_inputs = to_bool("normalize inputs", v);
       }},
      {"hidden activation",
       [](ExperimentConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "tanh") {
           c.model.activation = nn::HiddenActivation::tanh;
         } else if (t == "relu") {
           c.model.activation = nn::HiddenActivation::relu;
         } else {
           throw std::invalid_argument("config: hidden activation is 'tanh' or 'relu'");
         }
       }},
      {"optimizer",
       [](ExperimentConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "adam") {
           c.optimizer = nn::OptimizerKind::adam;
         } else if (t == "sgd") {
           c.optimizer = nn::OptimizerKind::sgd;
         } else {
           throw std::invalid_argument("config: optimizer is 'adam' or 'sgd'");
         }
       }},
      {"save checkpoints", [](ExperimentConfig& c, const std::string& v) {
         c.save_checkpoints = to_bool("save checkpoints", v);
       }},
      {"workers", [](ExperimentConfig& c, const std::string& v) {
         c.workers = to_int("workers", v);
       }},
      {"output directory", [](ExperimentConfig& c, const std::string& v) {
         c.output_dir = trim(v);
       }},
  };
  return keys;
}

// Experiment keys that must be applied after others because they read
// domain values or other experiment keys.
bool applied_late(const std::string& key) { return key == "tune critic step size"; }

}  // namespace

std::string to_string(rollout::BootstrapExponent e) {
  return e == rollout::BootstrapExponent::paper ? "paper" : "standard";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      const long long s = to_integer("seeds", item);
      if (s < 0) throw std::invalid_argument("config: seeds must be non-negative");
      seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
      const long long lo = to_integer("seeds", item.substr(0, dash));
      const long long hi = to_integer("seeds", item.substr(dash + 1));
      if (lo < 0 || hi < lo) throw std::invalid_argument("config: bad seed range '" + item + "'");
      for (long long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  return seeds;
}

ExperimentConfig default_config(const std::string& domain) {
  ExperimentConfig c;
  c.domain = domain;
  c.hyper = agent::DomainHyperparameters::for_domain(domain);
  c.critic_step_sizes = {c.hyper.critic_step_sizes.back()};
  for (std::uint64_t s = 0; s < 20; ++s) c.seeds.push_back(s);
  return c;
}

void ExperimentConfig::validate() const {
  envs::make_environment(domain);  // throws on unknown domain
  if (target_kinds.empty()) throw std::invalid_argument("config: no target kinds");
  if (horizons.empty()) throw std::invalid_argument("config: no horizons");
  for (int h : horizons) {
    if (h < 1) throw std::invalid_argument("config: horizons must be >= 1, got " + std::to_string(h));
  }
  if (k_samples < 1) throw std::invalid_argument("config: k samples must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("config: no seeds");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw std::invalid_argument("config: seeds must be distinct");
  if (episodes < 1) throw std::invalid_argument("config: episodes must be >= 1");
  if (critic_step_sizes.empty()) throw std::invalid_argument("config: no critic step size");
  for (double a : critic_step_sizes) {
    if (!(a >= 0.0)) throw std::invalid_argument("config: critic step size must be >= 0");
  }
  if (error_horizon < 0) throw std::invalid_argument("config: error horizon must be >= 0");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (hyper.critic_step_sizes.empty()) {
    throw std::invalid_argument("config: critic step size list is empty");
  }
  agent::AgentConfig probe;
  probe.domain = domain;
  probe.hyper = hyper;
  probe.episodes = episodes;
  probe.rollout.horizon = horizons.front();
  probe.rollout.samples = k_samples;
  probe.critic_step_size = critic_step_sizes.front();
  probe.validate();
}

std::string ExperimentConfig::canonical_text() const {
  const auto& h = hyper;
  std::ostringstream out;
  auto dbl = [](double d) { return format_double(d); };
  auto integer = [](auto i) { return std::to_string(i); };
  out << "[experiment]\n"
      << "domain = " << domain << "\n"
      << "target kinds = "
      << join(target_kinds, [](agent::TargetKind k) { return agent::to_string(k); }) << "\n"
      << "horizons = " << join(horizons, integer) << "\n"
      << "k samples = " << k_samples << "\n"
      << "seeds = " << join(seeds, integer) << "\n"
      << "episodes = " << episodes << "\n"
      << "critic step size = " << join(critic_step_sizes, dbl) << "\n"
      << "bootstrap exponent = " << to_string(bootstrap) << "\n"
      << "error horizon = " << error_horizon << "\n"
      << "prediction target = "
      << (model.target == models::PredictionTarget::absolute ? "absolute" : "delta") << "\n"
      << "normalize inputs = " << (model.normalize_inputs ? "true" : "false") << "\n"
      << "hidden activation = "
      << (model.activation == nn::HiddenActivation::tanh ? "tanh" : "relu") << "\n"
      << "optimizer = " << (optimizer == nn::OptimizerKind::adam ? "adam" : "sgd") << "\n"
      << "save checkpoints = " << (save_checkpoints ? "true" : "false") << "\n"
      << "\n[" << domain << "]\n"
      << "gamma (discount rate) = " << dbl(h.gamma) << "\n"
      << "critic network: hidden layers = " << h.critic_hidden_layers << "\n"
      << "critic network: neurons per hidden layer = " << h.critic_hidden_units << "\n"
      << "critic network: step size (tuned from the list) = " << join(h.critic_step_sizes, dbl)
      << "\n"
      << "critic network: batches of update per episode = " << h.critic_batches << "\n"
      << "critic network: batch size = " << h.critic_batch_size << "\n"
      << "actor network: hidden layers = " << h.actor_hidden_layers << "\n"
      << "actor network: neurons per hidden layer = " << h.actor_hidden_units << "\n"
      << "actor network: step size = " << dbl(h.actor_step_size) << "\n"
      << "actor network: batches of update per episode = " << h.actor_batches << "\n"
      << "actor network: batch size = length of episode\n"
      << "transition functions: hidden layers = " << h.transition_hidden_layers << "\n"
      << "transition functions: neurons per hidden layer = " << h.transition_hidden_units << "\n"
      << "transition functions: step size (optimized for one-step model) = "
      << dbl(h.transition_step_size) << "\n"
      << "transition functions: batches of update per episode = " << h.transition_batches << "\n"
      << "transition functions: batch size = " << h.transition_batch_size << "\n"
      << "reward model: hidden layers = " << h.reward_hidden_layers << "\n"
      << "reward model: neurons per hidden layer = " << h.reward_hidden_units << "\n"
      << "reward model: step size = " << dbl(h.reward_step_size) << "\n"
      << "reward model: batches of update per episode = " << h.reward_batches << "\n"
      << "reward model: batch size = " << h.reward_batch_size << "\n"
      << "maximum buffer size = " << h.buffer_size << "\n"
      << "target network update frequency = " << h.target_update_episodes << " episode\n"
      << "max episode steps = "
      << envs::make_environment(domain, h.max_episode_steps)->spec().max_episode_steps << "\n";
  return out.str();
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  std::map<std::string, std::string> experiment;
  if (auto section = tree.get_child_optional("experiment")) {
    for (const auto& [key, node] : *section) experiment[key] = node.data();
  }
  for (const auto& [key, value] : overrides) experiment[key] = value;

  const std::string domain =
      experiment.count("domain") ? trim(experiment.at("domain")) : std::string("cartpole");
  ExperimentConfig config = default_config(domain);

  for (const auto& [section_name, section] : tree) {
    if (section_name == "experiment") continue;
    if (section.data().size() > 0 && section.empty()) {
      throw std::invalid_argument("config: key '" + section_name + "' outside any section");
    }
    if (section_name != "cartpole" && section_name != "acrobot") {
      throw std::invalid_argument("config: unknown section [" + section_name + "]");
    }
    if (section_name != domain) continue;
    for (const auto& [key, node] : section) {
      const auto it = domain_keys().find(key);
      if (it == domain_keys().end()) {
        throw std::invalid_argument("config: unknown key '" + key + "' in [" + section_name + "]");
      }
      it->second(config, node.data());
    }
  }
  // A domain section may replace the candidate list; keep the default pick
  // consistent with it unless the experiment names a step size.
  config.critic_step_sizes = {config.hyper.critic_step_sizes.back()};

  for (const auto& [key, value] : experiment) {
    const auto it = experiment_keys().find(key);
    if (it == experiment_keys().end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' in [experiment]");
    }
    if (!applied_late(key)) it->second(config, value);
  }
  for (const auto& [key, value] : experiment) {
    if (applied_late(key)) experiment_keys().at(key)(config, value);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), overrides);
}

std::string git_blob_hash(const std::string& content) {
  const std::string object = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(object.data()), object.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xf]);
  }
  return out;
}

}  // namespace mstep::harness

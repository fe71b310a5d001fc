#include "gridflux/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "gridflux/errors.hpp"

namespace gridflux {
namespace {

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, const std::string& where,
          T& out) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": invalid value");
  }
}

std::vector<double> read_series(const YAML::Node& node, const std::string& where,
                                int length) {
  try {
    if (node.IsSequence()) return node.as<std::vector<double>>();
    return std::vector<double>(length, node.as<double>());
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": expected a number or a list of numbers");
  }
}

std::vector<sim::ApplianceSpec> read_appliances(const YAML::Node& list,
                                                const std::string& where,
                                                int intervals) {
  if (!list.IsSequence()) throw ConfigError(where + ": expected a list");
  std::vector<sim::ApplianceSpec> out;
  int i = 0;
  for (const auto& item : list) {
    const std::string w = where + "[" + std::to_string(i++) + "]";
    check_keys(item, w,
               {"name", "power", "duration_rate", "mean_duration",
                "arrival_prob"});
    sim::ApplianceSpec spec;
    spec.name = "appliance" + std::to_string(i - 1);
    read(item, "name", w, spec.name);
    read(item, "power", w, spec.power);
    if (item["duration_rate"] && item["mean_duration"]) {
      throw ConfigError(w + ": give duration_rate or mean_duration, not both");
    }
    read(item, "duration_rate", w, spec.duration_rate);
    if (item["mean_duration"]) {
      double mean = 0.0;
      read(item, "mean_duration", w, mean);
      if (!(mean > 0.0)) throw ConfigError(w + ".mean_duration must be > 0");
      spec.duration_rate = 1.0 / mean;
    }
    if (!item["arrival_prob"]) throw ConfigError(w + ": missing arrival_prob");
    spec.arrival_prob =
        read_series(item["arrival_prob"], w + ".arrival_prob", intervals);
    out.push_back(std::move(spec));
  }
  return out;
}

EnvConfig read_env(const YAML::Node& node) {
  const std::string w = "env";
  EnvConfig env;
  if (!node) return env;
  check_keys(node, w,
             {"n_households", "step_hours", "intervals_per_day", "price_window",
              "constraint_weight", "price_mode", "par_denominator",
              "quad_coeffs", "episode_steps", "fixed_durations", "queue_cap",
              "include_time", "include_price", "shared_household_streams",
              "seed", "appliances", "households"});
  read(node, "n_households", w, env.n_households);
  read(node, "step_hours", w, env.step_hours);
  read(node, "intervals_per_day", w, env.intervals_per_day);
  env.price_window = env.intervals_per_day;
  read(node, "price_window", w, env.price_window);
  read(node, "constraint_weight", w, env.constraint_weight);
  if (node["price_mode"]) {
    const auto mode = node["price_mode"].as<std::string>();
    if (mode == "par_linear") {
      env.price_mode = PriceMode::kParLinear;
    } else if (mode == "quadratic") {
      env.price_mode = PriceMode::kQuadratic;
    } else {
      throw ConfigError("env.price_mode: expected par_linear or quadratic, got '" +
                        mode + "'");
    }
  }
  if (node["par_denominator"]) {
    const auto d = node["par_denominator"].as<std::string>();
    if (d != "window" && d != "current_step") {
      throw ConfigError(
          "env.par_denominator: expected window or current_step, got '" + d +
          "'");
    }
    env.par_current_step = d == "current_step";
  }
  if (node["quad_coeffs"]) {
    env.quad_coeffs = read_series(node["quad_coeffs"], "env.quad_coeffs",
                                  env.intervals_per_day);
  }
  read(node, "episode_steps", w, env.episode_steps);
  read(node, "fixed_durations", w, env.fixed_durations);
  read(node, "queue_cap", w, env.queue_cap);
  read(node, "include_time", w, env.include_time);
  read(node, "include_price", w, env.include_price);
  read(node, "shared_household_streams", w, env.shared_household_streams);
  read(node, "seed", w, env.seed);
  if (node["appliances"] && node["households"]) {
    throw ConfigError("env: give appliances or households, not both");
  }
  if (node["appliances"]) {
    env.appliance_specs = {read_appliances(node["appliances"], "env.appliances",
                                           env.intervals_per_day)};
  }
  if (node["households"]) {
    const auto& hs = node["households"];
    if (!hs.IsSequence()) throw ConfigError("env.households: expected a list");
    int i = 0;
    for (const auto& h : hs) {
      const std::string hw = "env.households[" + std::to_string(i++) + "]";
      check_keys(h, hw, {"appliances"});
      if (!h["appliances"]) throw ConfigError(hw + ": missing appliances");
      env.appliance_specs.push_back(read_appliances(
          h["appliances"], hw + ".appliances", env.intervals_per_day));
    }
  }
  return env;
}

TrainConfig read_train(const YAML::Node& node) {
  const std::string w = "train";
  TrainConfig t;
  if (!node) return t;
  check_keys(node, w,
             {"algo", "critic_mode", "gamma", "clip_eps", "entropy_coeff",
              "actor_lr", "critic_lr", "epochs_per_iter", "minibatch_size",
              "critic_grad_steps", "rollout_steps", "max_grad_norm",
              "normalize_advantages", "mask_inert_actions",
              "bootstrap_time_limit", "reward_scale",
              "actor_hidden", "critic_hidden", "checkpoint_every",
              "share_policies", "policy_groups"});
  if (node["algo"]) {
    const auto a = node["algo"].as<std::string>();
    if (a == "ppo") {
      t.algo = Algo::kPpo;
    } else if (a == "a2c") {
      t.algo = Algo::kA2c;
    } else {
      throw ConfigError("train.algo: expected ppo or a2c, got '" + a + "'");
    }
  }
  if (node["critic_mode"]) {
    const auto c = node["critic_mode"].as<std::string>();
    if (c == "central") {
      t.critic_mode = CriticMode::kCentral;
    } else if (c == "decentral") {
      t.critic_mode = CriticMode::kDecentral;
    } else {
      throw ConfigError("train.critic_mode: expected central or decentral, got '" +
                        c + "'");
    }
  }
  read(node, "gamma", w, t.gamma);
  read(node, "clip_eps", w, t.clip_eps);
  read(node, "entropy_coeff", w, t.entropy_coeff);
  read(node, "actor_lr", w, t.actor_lr);
  read(node, "critic_lr", w, t.critic_lr);
  read(node, "epochs_per_iter", w, t.epochs_per_iter);
  read(node, "minibatch_size", w, t.minibatch_size);
  read(node, "critic_grad_steps", w, t.critic_grad_steps);
  read(node, "rollout_steps", w, t.rollout_steps);
  read(node, "max_grad_norm", w, t.max_grad_norm);
  read(node, "normalize_advantages", w, t.normalize_advantages);
  read(node, "mask_inert_actions", w, t.mask_inert_actions);
  read(node, "bootstrap_time_limit", w, t.bootstrap_time_limit);
  read(node, "reward_scale", w, t.reward_scale);
  read(node, "actor_hidden", w, t.actor_hidden);
  read(node, "critic_hidden", w, t.critic_hidden);
  read(node, "checkpoint_every", w, t.checkpoint_every);
  read(node, "policy_groups", w, t.policy_groups);
  bool share = false;
  read(node, "share_policies", w, share);
  if (share && t.policy_groups.empty()) t.policy_groups = {-1};
  return t;
}

RunConfig from_node(const YAML::Node& root) {
  RunConfig cfg;
  if (root.IsNull()) {
    cfg.env.finalize();
    return cfg;
  }
  check_keys(root, "config", {"env", "train"});
  cfg.env = read_env(root["env"]);
  cfg.train = read_train(root["train"]);
  cfg.env.finalize();
  // share_policies: true expands to pairs once N is known
  if (cfg.train.policy_groups.size() == 1 && cfg.train.policy_groups[0] == -1) {
    cfg.train.policy_groups = paired_policy_groups(cfg.env.n_households);
  }
  cfg.train.validate(cfg.env.n_households);
  return cfg;
}

void emit_series(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << x;
  out << YAML::EndSeq;
}

void emit_appliances(YAML::Emitter& out,
                     const std::vector<sim::ApplianceSpec>& specs) {
  out << YAML::BeginSeq;
  for (const auto& s : specs) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "power" << YAML::Value << s.power;
    out << YAML::Key << "duration_rate" << YAML::Value << s.duration_rate;
    out << YAML::Key << "arrival_prob" << YAML::Value;
    emit_series(out, s.arrival_prob);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  try {
    return from_node(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const RunConfig& cfg) {
  const auto& e = cfg.env;
  const auto& t = cfg.train;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "env" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_households" << YAML::Value << e.n_households;
  out << YAML::Key << "step_hours" << YAML::Value << e.step_hours;
  out << YAML::Key << "intervals_per_day" << YAML::Value << e.intervals_per_day;
  out << YAML::Key << "price_window" << YAML::Value << e.price_window;
  out << YAML::Key << "constraint_weight" << YAML::Value << e.constraint_weight;
  out << YAML::Key << "price_mode" << YAML::Value << to_string(e.price_mode);
  out << YAML::Key << "par_denominator" << YAML::Value
      << (e.par_current_step ? "current_step" : "window");
  if (!e.quad_coeffs.empty()) {
    out << YAML::Key << "quad_coeffs" << YAML::Value;
    emit_series(out, e.quad_coeffs);
  }
  out << YAML::Key << "episode_steps" << YAML::Value << e.episode_steps;
  out << YAML::Key << "fixed_durations" << YAML::Value << e.fixed_durations;
  out << YAML::Key << "queue_cap" << YAML::Value << e.queue_cap;
  out << YAML::Key << "include_time" << YAML::Value << e.include_time;
  out << YAML::Key << "include_price" << YAML::Value << e.include_price;
  out << YAML::Key << "shared_household_streams" << YAML::Value
      << e.shared_household_streams;
  out << YAML::Key << "seed" << YAML::Value << e.seed;
  if (e.appliance_specs.size() == 1) {
    out << YAML::Key << "appliances" << YAML::Value;
    emit_appliances(out, e.appliance_specs.front());
  } else {
    out << YAML::Key << "households" << YAML::Value << YAML::BeginSeq;
    for (const auto& h : e.appliance_specs) {
      out << YAML::BeginMap << YAML::Key << "appliances" << YAML::Value;
      emit_appliances(out, h);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "algo" << YAML::Value << to_string(t.algo);
  out << YAML::Key << "critic_mode" << YAML::Value << to_string(t.critic_mode);
  out << YAML::Key << "gamma" << YAML::Value << t.gamma;
  out << YAML::Key << "clip_eps" << YAML::Value << t.clip_eps;
  out << YAML::Key << "entropy_coeff" << YAML::Value << t.entropy_coeff;
  out << YAML::Key << "actor_lr" << YAML::Value << t.actor_lr;
  out << YAML::Key << "critic_lr" << YAML::Value << t.critic_lr;
  out << YAML::Key << "epochs_per_iter" << YAML::Value << t.epochs_per_iter;
  out << YAML::Key << "minibatch_size" << YAML::Value << t.minibatch_size;
  out << YAML::Key << "critic_grad_steps" << YAML::Value << t.critic_grad_steps;
  out << YAML::Key << "rollout_steps" << YAML::Value << t.rollout_steps;
  out << YAML::Key << "max_grad_norm" << YAML::Value << t.max_grad_norm;
  out << YAML::Key << "normalize_advantages" << YAML::Value
      << t.normalize_advantages;
  out << YAML::Key << "mask_inert_actions" << YAML::Value
      << t.mask_inert_actions;
  out << YAML::Key << "bootstrap_time_limit" << YAML::Value
      << t.bootstrap_time_limit;
  out << YAML::Key << "reward_scale" << YAML::Value << t.reward_scale;
  out << YAML::Key << "actor_hidden" << YAML::Value << t.actor_hidden;
  out << YAML::Key << "critic_hidden" << YAML::Value << t.critic_hidden;
  out << YAML::Key << "checkpoint_every" << YAML::Value << t.checkpoint_every;
  if (!t.policy_groups.empty()) {
    out << YAML::Key << "policy_groups" << YAML::Value << YAML::Flow
        << t.policy_groups;
  }
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace gridflux

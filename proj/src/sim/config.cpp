#include "gridflux/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gridflux/errors.hpp"

namespace gridflux {
namespace {

struct ProfileShape {
  const char* name;
  double power;          // kW
  double mean_hours;     // task length
  double tasks_per_day;  // expected arrivals per day
  double base;           // flat share of daily arrivals
  double morning;        // share centred at 07:30
  double evening;        // share centred at 19:00
};

// Plausible household loads. Weights are relative; the flat base keeps some
// night-time activity.
constexpr ProfileShape kDefaultProfile[] = {
    {"washer", 0.5, 1.0, 1.0, 0.2, 0.5, 0.3},
    {"dryer", 3.0, 1.0, 0.8, 0.1, 0.4, 0.5},
    {"water_heater", 2.5, 0.75, 3.0, 0.1, 0.5, 0.4},
    {"dishwasher", 1.2, 1.5, 1.0, 0.1, 0.2, 0.7},
    {"refrigerator", 0.5, 0.5, 6.0, 0.6, 0.2, 0.2},
};

double bump(double hour, double centre, double width) {
  // circular distance on a 24 h clock
  double d = std::fabs(hour - centre);
  d = std::min(d, 24.0 - d);
  return std::exp(-0.5 * d * d / (width * width));
}

}  // namespace

const std::vector<sim::ApplianceSpec>& EnvConfig::specs_for(int household) const {
  return appliance_specs.size() == 1 ? appliance_specs.front()
                                     : appliance_specs[household];
}

double EnvConfig::quad_coeff(std::size_t interval) const {
  return quad_coeffs.empty() ? 0.5 : quad_coeffs[interval];
}

void EnvConfig::finalize() {
  if (appliance_specs.empty() && intervals_per_day > 0 && step_hours > 0.0) {
    appliance_specs.push_back(default_appliances(intervals_per_day, step_hours));
  }
  if (quad_coeffs.size() == 1 && intervals_per_day > 1) {
    quad_coeffs.assign(intervals_per_day, quad_coeffs.front());
  }
  validate();
}

void EnvConfig::validate() const {
  if (n_households < 1) throw ConfigError("n_households must be >= 1");
  if (!(step_hours > 0.0)) throw ConfigError("step_hours must be > 0");
  if (intervals_per_day < 1) throw ConfigError("intervals_per_day must be >= 1");
  if (std::fabs(intervals_per_day * step_hours - 24.0) > 1e-9) {
    throw ConfigError("intervals_per_day * step_hours must equal 24 h (got " +
                      std::to_string(intervals_per_day * step_hours) + ")");
  }
  if (price_window < 1) throw ConfigError("price_window must be >= 1");
  if (episode_steps < 1) throw ConfigError("episode_steps must be >= 1");
  if (!(constraint_weight >= 0.0)) {
    throw ConfigError("constraint_weight must be >= 0");
  }
  if (queue_cap < 1) throw ConfigError("queue_cap must be >= 1");
  if (!quad_coeffs.empty()) {
    if (quad_coeffs.size() != static_cast<std::size_t>(intervals_per_day)) {
      throw ConfigError("quad_coeffs must have intervals_per_day entries");
    }
    for (double b : quad_coeffs) {
      if (!(b >= 0.0)) throw ConfigError("quad_coeffs entries must be >= 0");
    }
  }
  if (appliance_specs.empty()) throw ConfigError("appliance_specs is empty");
  if (appliance_specs.size() != 1 &&
      appliance_specs.size() != static_cast<std::size_t>(n_households)) {
    throw ConfigError("appliance_specs must list 1 or n_households households");
  }
  const std::size_t m = appliance_specs.front().size();
  if (m == 0) throw ConfigError("households need at least one appliance");
  for (const auto& house : appliance_specs) {
    if (house.size() != m) {
      throw ConfigError("all households must have the same appliance count");
    }
    for (const auto& spec : house) spec.validate(intervals_per_day);
  }
}

std::vector<sim::ApplianceSpec> default_appliances(int intervals_per_day,
                                                   double step_hours) {
  std::vector<sim::ApplianceSpec> out;
  for (const auto& shape : kDefaultProfile) {
    std::vector<double> weight(intervals_per_day);
    double total = 0.0;
    for (int h = 0; h < intervals_per_day; ++h) {
      const double hour = (h + 0.5) * step_hours;
      weight[h] = shape.base / 24.0 +
                  shape.morning * bump(hour, 7.5, 1.0) /
                      (std::sqrt(2.0 * std::numbers::pi) * 1.0) +
                  shape.evening * bump(hour, 19.0, 1.5) /
                      (std::sqrt(2.0 * std::numbers::pi) * 1.5);
      total += weight[h] * step_hours;
    }
    sim::ApplianceSpec spec;
    spec.name = shape.name;
    spec.power = shape.power;
    spec.duration_rate = 1.0 / shape.mean_hours;
    spec.arrival_prob.resize(intervals_per_day);
    for (int h = 0; h < intervals_per_day; ++h) {
      const double per_hour = shape.tasks_per_day * weight[h] / total;
      spec.arrival_prob[h] = std::clamp(per_hour * step_hours, 0.0, 1.0);
    }
    out.push_back(std::move(spec));
  }
  return out;
}

EnvConfig ecs_comparison_env() {
  EnvConfig cfg;
  cfg.n_households = 10;
  cfg.step_hours = 1.0;
  cfg.intervals_per_day = 24;
  cfg.price_window = 24;
  cfg.price_mode = PriceMode::kQuadratic;
  cfg.fixed_durations = true;
  cfg.episode_steps = 120;
  cfg.quad_coeffs.assign(24, 0.5);
  auto specs = default_appliances(cfg.intervals_per_day, cfg.step_hours);
  // Fixed lengths l = 1/rate must already satisfy l >= T.
  for (auto& spec : specs) {
    spec.duration_rate = std::min(spec.duration_rate, 1.0 / cfg.step_hours);
  }
  cfg.appliance_specs = {specs};
  cfg.finalize();
  return cfg;
}

void TrainConfig::validate(int n_households) const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(clip_eps > 0.0)) throw ConfigError("clip_eps must be > 0");
  if (!(entropy_coeff >= 0.0)) throw ConfigError("entropy_coeff must be >= 0");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw ConfigError("learning rates must be > 0");
  }
  if (epochs_per_iter < 1) throw ConfigError("epochs_per_iter must be >= 1");
  if (minibatch_size < 1) throw ConfigError("minibatch_size must be >= 1");
  if (critic_grad_steps < 0) throw ConfigError("critic_grad_steps must be >= 0");
  if (rollout_steps < 1) throw ConfigError("rollout_steps must be >= 1");
  if (!(reward_scale > 0.0)) throw ConfigError("reward_scale must be > 0");
  if (actor_hidden < 1 || critic_hidden < 1) {
    throw ConfigError("hidden widths must be >= 1");
  }
  if (!policy_groups.empty()) {
    if (policy_groups.size() != static_cast<std::size_t>(n_households)) {
      throw ConfigError("policy_groups must have one entry per household");
    }
    const int n_groups =
        *std::max_element(policy_groups.begin(), policy_groups.end()) + 1;
    for (int g = 0; g < n_groups; ++g) {
      if (std::find(policy_groups.begin(), policy_groups.end(), g) ==
          policy_groups.end()) {
        throw ConfigError("policy_groups must use contiguous ids from 0");
      }
    }
    for (int g : policy_groups) {
      if (g < 0) throw ConfigError("policy_groups ids must be >= 0");
    }
  }
}

std::vector<int> paired_policy_groups(int n_households) {
  std::vector<int> groups(n_households);
  for (int n = 0; n < n_households; ++n) groups[n] = n / 2;
  return groups;
}

std::string to_string(PriceMode m) {
  return m == PriceMode::kQuadratic ? "quadratic" : "par_linear";
}

std::string to_string(CriticMode m) {
  return m == CriticMode::kCentral ? "central" : "decentral";
}

std::string to_string(Algo a) { return a == Algo::kA2c ? "a2c" : "ppo"; }

}  // namespace gridflux

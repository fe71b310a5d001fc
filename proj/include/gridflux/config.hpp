#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridflux/sim.hpp"

namespace gridflux {

enum class PriceMode { kParLinear, kQuadratic };
enum class CriticMode { kCentral, kDecentral };
enum class Algo { kPpo, kA2c };

struct EnvConfig {
  int n_households = 8;
  double step_hours = 0.5;
  int intervals_per_day = 48;
  int price_window = 48;
  double constraint_weight = 2.2;
  PriceMode price_mode = PriceMode::kParLinear;
  // Use the current-step total as the PAR denominator instead of the window
  // sum (sensitivity analysis only).
  bool par_current_step = false;
  std::vector<double> quad_coeffs;  // length H; empty -> 0.5 everywhere
  int episode_steps = 240;
  bool fixed_durations = false;
  int queue_cap = 10;
  bool include_time = true;
  bool include_price = true;
  // Every household draws from household-0 streams (symmetry experiments).
  bool shared_household_streams = false;
  std::uint64_t seed = 0;
  // One list per household (size N), or a single list applied to all.
  std::vector<std::vector<sim::ApplianceSpec>> appliance_specs;

  int n_appliances() const {
    return appliance_specs.empty()
               ? 0
               : static_cast<int>(appliance_specs.front().size());
  }
  const std::vector<sim::ApplianceSpec>& specs_for(int household) const;
  double quad_coeff(std::size_t interval) const;

  // Fills in derived defaults (profiles, coefficients) then validates.
  // Throws ConfigError naming the violated constraint.
  void finalize();
  void validate() const;
};

// Five-appliance household (washer, dryer, water heater, dishwasher,
// refrigerator) with morning and evening demand peaks, sampled for H
// intervals of step_hours each.
std::vector<sim::ApplianceSpec> default_appliances(int intervals_per_day,
                                                   double step_hours);

// Day-ahead comparison setup: 10 households, hourly steps, quadratic price,
// fixed task lengths.
EnvConfig ecs_comparison_env();

struct TrainConfig {
  Algo algo = Algo::kPpo;
  CriticMode critic_mode = CriticMode::kCentral;
  double gamma = 0.99;
  double clip_eps = 0.2;
  double entropy_coeff = 0.01;
  double actor_lr = 3e-4;
  double critic_lr = 1e-3;
  int epochs_per_iter = 10;
  int minibatch_size = 512;
  int critic_grad_steps = 20;
  int rollout_steps = 5040;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
  // Score only the delay components that scheduled a task; the rest cannot
  // influence the reward and only add variance to the gradient.
  bool mask_inert_actions = true;
  bool bootstrap_time_limit = false;
  // Divides rewards before they reach the critic and advantages.
  double reward_scale = 1.0;
  int actor_hidden = 64;
  int critic_hidden = 64;
  int checkpoint_every = 0;
  // Household -> policy group. Empty means one policy per household.
  std::vector<int> policy_groups;

  void validate(int n_households) const;
};

// Pairs households (0,1), (2,3), ... onto shared policies.
std::vector<int> paired_policy_groups(int n_households);

std::string to_string(PriceMode m);
std::string to_string(CriticMode m);
std::string to_string(Algo a);

}  // namespace gridflux

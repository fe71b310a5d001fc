#pragma once

// Partially observable Markov game over N households: reset/step on joint
// delay actions, per-agent observation assembly and the joint state used by
// the centralized critic.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridflux/config.hpp"
#include "gridflux/pricing.hpp"
#include "gridflux/sim.hpp"

namespace gridflux {

struct ObservationFlags {
  bool include_price = true;
  bool include_time = true;
};

// Local state of one household plus the optional published signals.
struct GridObservation {
  std::vector<double> op_flags;        // x_n
  std::vector<double> times_to_free;   // t_n, hours
  std::vector<double> head_durations;  // l_n, hours
  std::vector<double> queue_lens;      // q_n
  double prev_price = 0.0;             // p(k-1)
  double time_of_day = 0.0;            // h(k)/H
  ObservationFlags flags;

  static std::size_t dimension(std::size_t n_appliances, ObservationFlags f) {
    return 4 * n_appliances + (f.include_price ? 1 : 0) +
           (f.include_time ? 1 : 0);
  }
  std::size_t dimension() const {
    return dimension(op_flags.size(), flags);
  }

  // Network input: durations and times scaled by 1/T, queue lengths by
  // 1/queue_cap, price by 1/T.
  void encode(double step_hours, int queue_cap, std::span<double> out) const;
};

// Normalized local state s_n (4M entries, same scaling as the observation).
void encode_household_state(const sim::HouseholdState& h, double step_hours,
                            int queue_cap, std::span<double> out);

struct StepInfo {
  std::vector<double> energy;     // E_n(k), kWh
  std::vector<double> cost;       // r_c,n(k)
  std::vector<double> price;      // price faced by each household
  std::vector<int> arrived;       // tasks arrived this step
  std::vector<int> completed;     // tasks completed this step
  std::vector<std::uint8_t> started;  // [n][m]: delay took effect
  double aggregate_energy = 0.0;  // sum_n E_n(k)
  double grid_price = 0.0;        // p(k) (PAR mode), mean unit cost otherwise
  std::size_t interval = 0;       // h(k)
};

struct StepResult {
  std::vector<GridObservation> observations;
  std::vector<double> rewards;
  // N x 4M normalized household states in household order.
  std::vector<double> joint_state;
  bool done = false;
  StepInfo info;
};

class GridEnv {
 public:
  // Finalizes and validates the config; throws ConfigError.
  explicit GridEnv(EnvConfig config);

  StepResult reset();
  StepResult reset(std::uint64_t seed);
  // joint_action holds N*M delays, household-major. Throws std::logic_error
  // when the episode is already over.
  StepResult step(std::span<const double> joint_action);

  const EnvConfig& config() const { return config_; }
  int n_agents() const { return config_.n_households; }
  int n_appliances() const { return config_.n_appliances(); }
  std::size_t obs_dim() const;
  std::size_t state_dim() const { return 4 * n_appliances(); }
  ObservationFlags flags() const {
    return {config_.include_price, config_.include_time};
  }
  long step_count() const { return step_; }
  bool done() const { return step_ >= config_.episode_steps; }
  const sim::HouseholdState& household(int n) const { return households_[n]; }
  std::span<const double> prev_prices() const { return prev_price_; }
  std::size_t interval() const {
    return sim::clock_map(step_, config_.intervals_per_day);
  }

 private:
  StepResult observe() const;

  EnvConfig config_;
  std::vector<sim::HouseholdState> households_;
  std::vector<sim::HouseholdStreams> streams_;
  pricing::PriceWindow window_;
  std::vector<double> prev_price_;
  sim::DurationModel durations_;
  long step_ = 0;
};

}  // namespace gridflux

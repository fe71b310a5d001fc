#pragma once

// Household and appliance dynamics: Bernoulli task arrivals, clamped
// exponential durations, bounded start delays and continuous-time energy
// accounting inside each discrete step.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "gridflux/rng.hpp"

namespace gridflux::sim {

struct ApplianceSpec {
  std::string name;
  double power = 1.0;                // kW
  std::vector<double> arrival_prob;  // per time-of-day interval, length H
  double duration_rate = 1.0;        // 1/hours

  double mean_duration() const { return 1.0 / duration_rate; }
  // Throws ConfigError naming the violated field.
  void validate(std::size_t intervals_per_day) const;
};

class ApplianceRuntime {
 public:
  bool operating() const { return operating_; }
  double time_to_free() const { return pending_delay_ + remaining_run_; }
  // Duration of the task at the head of the queue, 0 when the queue is empty.
  double next_task_duration() const {
    return queue_.empty() ? 0.0 : queue_.front();
  }
  std::size_t queue_len() const { return queue_.size(); }
  double remaining_run() const { return remaining_run_; }
  double pending_delay() const { return pending_delay_; }
  bool busy() const { return remaining_run_ > 0.0; }
  const std::deque<double>& queued_durations() const { return queue_; }

  void enqueue(double duration) { queue_.push_back(duration); }
  // Starts the head task after `delay` hours if idle; returns true on start.
  bool try_start(double delay);
  // Runs one step of `step_hours`. Returns hours in operation; sets
  // `completed` when the running task finished during this step.
  double advance(double step_hours, bool& completed);

 private:
  std::deque<double> queue_;
  double remaining_run_ = 0.0;
  double pending_delay_ = 0.0;
  bool operating_ = false;
};

struct HouseholdState {
  std::vector<ApplianceRuntime> appliances;
  double energy_this_step = 0.0;  // kWh
  long tasks_arrived_cum = 0;
  long tasks_completed_cum = 0;

  explicit HouseholdState(std::size_t n_appliances = 0)
      : appliances(n_appliances) {}
};

struct StepCounts {
  int arrived = 0;
  int completed = 0;
};

std::size_t clock_map(long step, std::size_t intervals_per_day);

// max(step_hours, Exponential(rate)).
double sample_duration(double rate, double step_hours, Rng& rng);

// Per-appliance RNG streams owned by one household.
struct HouseholdStreams {
  std::vector<Rng> arrival;
  std::vector<Rng> duration;

  static HouseholdStreams make(std::uint64_t seed, std::uint64_t household,
                               std::size_t n_appliances);
};

// Duration draw policy: clamped exponential, or the fixed 1/rate length
// (clamped to at least one step) used by the day-ahead comparison setup.
struct DurationModel {
  double step_hours = 0.5;
  bool fixed = false;

  double draw(const ApplianceSpec& spec, Rng& rng) const;
};

int sample_arrivals(HouseholdState& household,
                    std::span<const ApplianceSpec> specs, std::size_t interval,
                    HouseholdStreams& streams, const DurationModel& durations);

// Delays must lie in [0, step_hours]; out-of-range values throw ConfigError.
// When `started` is non-empty it receives 1 for each appliance whose delay
// took effect (a queued task was scheduled) and 0 otherwise.
void apply_actions(HouseholdState& household, std::span<const double> delays,
                   double step_hours, std::span<std::uint8_t> started = {});

// Returns E_n(k) and fills per-appliance run lengths when `run_hours` is
// non-empty.
double advance_time(HouseholdState& household,
                    std::span<const ApplianceSpec> specs, double step_hours,
                    int& completed, std::span<double> run_hours = {});

}  // namespace gridflux::sim

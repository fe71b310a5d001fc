#include "gridflux/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridflux/errors.hpp"

namespace gridflux::sim {
namespace {

// Run-length residues below this are treated as task completion.
constexpr double kTimeEps = 1e-12;

}  // namespace

void ApplianceSpec::validate(std::size_t intervals_per_day) const {
  const std::string who = "appliance '" + name + "': ";
  if (!(power > 0.0)) throw ConfigError(who + "power must be > 0");
  if (!(duration_rate > 0.0)) throw ConfigError(who + "duration_rate must be > 0");
  if (arrival_prob.size() != intervals_per_day) {
    throw ConfigError(who + "arrival_prob must have exactly " +
                      std::to_string(intervals_per_day) + " entries, got " +
                      std::to_string(arrival_prob.size()));
  }
  for (double p : arrival_prob) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(who + "arrival_prob entries must lie in [0, 1]");
    }
  }
}

bool ApplianceRuntime::try_start(double delay) {
  if (busy() || queue_.empty()) return false;
  pending_delay_ = delay;
  remaining_run_ = queue_.front();
  queue_.pop_front();
  return true;
}

double ApplianceRuntime::advance(double step_hours, bool& completed) {
  completed = false;
  const double wait = std::min(pending_delay_, step_hours);
  pending_delay_ -= wait;
  double run = 0.0;
  if (remaining_run_ > 0.0) {
    const double window = step_hours - wait;
    if (remaining_run_ <= window + kTimeEps) {
      run = remaining_run_;
      remaining_run_ = 0.0;
      completed = true;
    } else {
      run = window;
      remaining_run_ -= window;
    }
  }
  operating_ = run > 0.0;
  return run;
}

std::size_t clock_map(long step, std::size_t intervals_per_day) {
  return static_cast<std::size_t>(step) % intervals_per_day;
}

double sample_duration(double rate, double step_hours, Rng& rng) {
  std::exponential_distribution<double> dist(rate);
  return std::max(step_hours, dist(rng));
}

double DurationModel::draw(const ApplianceSpec& spec, Rng& rng) const {
  if (fixed) return std::max(step_hours, spec.mean_duration());
  return sample_duration(spec.duration_rate, step_hours, rng);
}

HouseholdStreams HouseholdStreams::make(std::uint64_t seed,
                                        std::uint64_t household,
                                        std::size_t n_appliances) {
  HouseholdStreams s;
  s.arrival.reserve(n_appliances);
  s.duration.reserve(n_appliances);
  for (std::size_t m = 0; m < n_appliances; ++m) {
    s.arrival.push_back(
        make_stream(seed, household, m, StreamPurpose::kArrival));
    s.duration.push_back(
        make_stream(seed, household, m, StreamPurpose::kDuration));
  }
  return s;
}

int sample_arrivals(HouseholdState& household,
                    std::span<const ApplianceSpec> specs, std::size_t interval,
                    HouseholdStreams& streams, const DurationModel& durations) {
  int arrived = 0;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    // One uniform per appliance per step keeps the stream aligned regardless
    // of the outcome.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double draw = u(streams.arrival[m]);
    if (draw < specs[m].arrival_prob[interval]) {
      household.appliances[m].enqueue(
          durations.draw(specs[m], streams.duration[m]));
      ++household.tasks_arrived_cum;
      ++arrived;
    }
  }
  return arrived;
}

void apply_actions(HouseholdState& household, std::span<const double> delays,
                   double step_hours, std::span<std::uint8_t> started) {
  if (delays.size() != household.appliances.size()) {
    throw ConfigError("apply_actions: expected " +
                      std::to_string(household.appliances.size()) +
                      " delays, got " + std::to_string(delays.size()));
  }
  for (std::size_t m = 0; m < delays.size(); ++m) {
    if (!(delays[m] >= 0.0 && delays[m] <= step_hours)) {
      throw ConfigError("apply_actions: delay " + std::to_string(delays[m]) +
                        " outside [0, " + std::to_string(step_hours) + "]");
    }
  }
  for (std::size_t m = 0; m < delays.size(); ++m) {
    const bool s = household.appliances[m].try_start(delays[m]);
    if (!started.empty()) started[m] = s ? 1 : 0;
  }
}

double advance_time(HouseholdState& household,
                    std::span<const ApplianceSpec> specs, double step_hours,
                    int& completed, std::span<double> run_hours) {
  completed = 0;
  double energy = 0.0;
  for (std::size_t m = 0; m < household.appliances.size(); ++m) {
    bool done = false;
    const double d = household.appliances[m].advance(step_hours, done);
    if (!run_hours.empty()) run_hours[m] = d;
    energy += d * specs[m].power;
    if (done) ++completed;
  }
  household.tasks_completed_cum += completed;
  household.energy_this_step = energy;
  return energy;
}

}  // namespace gridflux::sim

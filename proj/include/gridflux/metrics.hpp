#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gridflux/rollout.hpp"

namespace gridflux {

struct IterationMetrics {
  int iteration = 0;
  std::uint64_t seed = 0;
  double avg_reward_per_day = 0.0;  // per household
  double avg_cost_per_day = 0.0;    // per household, currency units
  double avg_energy_per_day = 0.0;  // per household, kWh
  double par = 1.0;                 // mean over days of peak/mean step load
  double tasks_completed_pct = 0.0;
  double wall_time = 0.0;           // seconds
};

// Mean aggregate kWh per time-of-day interval across the batch's days.
struct EnergyProfile {
  int iteration = 0;
  std::vector<double> mean_kwh;
  double peak() const;
};

struct BatchMetrics {
  IterationMetrics metrics;
  EnergyProfile profile;
};

// The batch must start at 00:00 and cover a whole number of days.
BatchMetrics compute_metrics(const RolloutBatch& batch);

inline constexpr std::string_view kMetricsHeader =
    "iteration,seed,avg_reward_per_day,avg_cost_per_day,avg_energy_per_day,"
    "par,tasks_completed_pct,wall_time";
inline constexpr std::string_view kProfileHeader =
    "iteration,interval_index,wall_clock_label,mean_kwh";

// "HH:MM" start of interval h.
std::string wall_clock_label(int interval, int intervals_per_day);

// Append-only CSV writers; the header is written when the file is new or
// empty. I/O failures throw std::runtime_error naming the path.
void append_metrics(const std::filesystem::path& path,
                    const IterationMetrics& row);
void write_metrics_header(const std::filesystem::path& path);
std::vector<IterationMetrics> read_metrics(const std::filesystem::path& path);

void write_profile_header(const std::filesystem::path& path);
void append_profile(const std::filesystem::path& path,
                    const EnergyProfile& profile);
std::vector<EnergyProfile> read_profiles(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace gridflux

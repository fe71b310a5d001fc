#pragma once

// Continuous-time reference for one appliance, written without the
// simulator's step-by-step carry-over: every task becomes an absolute
// interval [start, end) on the time axis and per-step quantities are read off
// by overlap.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace gridflux::oracle {

struct ScriptedTask {
  int arrival_step;
  double duration;  // hours
};

struct StepView {
  double run_hours = 0.0;   // overlap of the busy interval with the step
  bool operating = false;
  double time_to_free = 0.0;  // at the end of the step
  std::size_t queue_len = 0;  // at the end of the step
  int completed = 0;          // tasks whose end falls inside the step
};

// delays[k] is the delay the agent chose at step k (ignored when the
// appliance cannot start). Tasks must be sorted by arrival step.
inline std::vector<StepView> simulate_appliance(
    const std::vector<ScriptedTask>& tasks, const std::vector<double>& delays,
    double step_hours, int steps) {
  struct Interval {
    double start, end;
  };
  std::vector<Interval> runs;
  std::size_t next_task = 0;  // first task not yet started
  double busy_until = 0.0;
  constexpr double kTol = 1e-12;

  std::vector<StepView> out(steps);
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * step_hours;
    const double t1 = t0 + step_hours;
    // decision point: idle and something has arrived
    if (busy_until <= t0 + kTol && next_task < tasks.size() &&
        tasks[next_task].arrival_step <= k) {
      const double s = t0 + delays[k];
      runs.push_back({s, s + tasks[next_task].duration});
      busy_until = runs.back().end;
      ++next_task;
    }
    StepView& v = out[k];
    for (const auto& r : runs) {
      v.run_hours += std::max(0.0, std::min(r.end, t1) - std::max(r.start, t0));
      if (r.end > t0 + kTol && r.end <= t1 + kTol) ++v.completed;
    }
    v.operating = v.run_hours > 0.0;
    v.time_to_free = std::max(0.0, busy_until - t1);
    if (v.time_to_free < kTol) v.time_to_free = 0.0;
    std::size_t arrived = 0;
    for (const auto& t : tasks) arrived += t.arrival_step <= k ? 1 : 0;
    v.queue_len = arrived - next_task;
  }
  return out;
}

}  // namespace gridflux::oracle

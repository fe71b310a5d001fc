#pragma once

// Non-learning reference policies and the day-ahead energy consumption
// scheduler (ECS): a convex quadratic program solved per household by
// projected gradient descent on the capped simplex.

#include <cstdint>
#include <span>
#include <vector>

#include "gridflux/config.hpp"
#include "gridflux/metrics.hpp"
#include "gridflux/rollout.hpp"

namespace gridflux::baselines {

void zero_delay(std::span<double> actions);
void uniform_random(std::span<double> actions, double max_delay, Rng& rng);

class ZeroDelayActor final : public Actor {
 public:
  double act(std::span<const double> obs, Rng& rng, std::span<double> action,
             std::span<double> raw) override;
};

class UniformRandomActor final : public Actor {
 public:
  explicit UniformRandomActor(double max_delay) : max_delay_(max_delay) {}
  double act(std::span<const double> obs, Rng& rng, std::span<double> action,
             std::span<double> raw) override;

 private:
  double max_delay_;
};

enum class BaselinePolicy { kZero, kRandom };

// Runs `days` simulated days with the given policy for every household and
// returns the batch metrics.
BatchMetrics evaluate_baseline(const EnvConfig& env, BaselinePolicy policy,
                               int days, std::uint64_t seed);

// Expected daily energy of one appliance with fixed task length 1/rate:
// sum_h p(h) * (1/rate) * P.
double ecs_daily_energy(const sim::ApplianceSpec& spec, int intervals_per_day);

struct EcsProblem {
  std::vector<double> coeffs;  // b(h)
  double daily_energy = 0.0;   // kWh to place over the day
  std::vector<double> caps;    // per-interval kWh ceiling

  int horizon() const { return static_cast<int>(coeffs.size()); }
  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

struct EcsSolution {
  std::vector<double> energy;
  double objective = 0.0;     // sum_h b(h) E(h)^2
  double kkt_residual = 0.0;  // ||E - proj(E - grad)||_inf
  int iterations = 0;
};

// Euclidean projection onto {x : sum x = total, 0 <= x <= caps}.
std::vector<double> project_capped_simplex(std::span<const double> y,
                                           double total,
                                           std::span<const double> caps);

EcsSolution ecs_solve(const EcsProblem& problem, double tolerance = 1e-8,
                      int max_iterations = 1000000);

// One problem per household, built from its appliance specs.
std::vector<EcsProblem> ecs_problems(const EnvConfig& env);

struct EcsSchedule {
  std::vector<std::vector<double>> energy;  // [household][interval]
};

EcsSchedule ecs_schedule(const EnvConfig& env);

struct EcsEvaluation {
  double avg_reward_per_day = 0.0;
  double avg_cost_per_day = 0.0;
  double avg_energy_per_day = 0.0;  // fulfilled
  double avg_demand_per_day = 0.0;  // realized
  double par = 1.0;
  double fulfilled_pct = 0.0;
  EnergyProfile profile;
};

// Replays the stochastic demand process; each interval a household consumes
// min(planned, backlog of arrived task energy), pays b(h) E^2 and earns
// w * E. Unserved backlog is dropped at the end of each day.
EcsEvaluation ecs_evaluate(const EcsSchedule& schedule, const EnvConfig& env,
                           int days, std::uint64_t seed);

// Planned reward of one household: -objective + w * daily_energy.
double ecs_planned_reward(const EcsSolution& s, double w);

}  // namespace gridflux::baselines

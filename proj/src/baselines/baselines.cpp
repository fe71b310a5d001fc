#include "gridflux/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gridflux/errors.hpp"
#include "gridflux/sim.hpp"

namespace gridflux::baselines {

void zero_delay(std::span<double> actions) {
  std::fill(actions.begin(), actions.end(), 0.0);
}

void uniform_random(std::span<double> actions, double max_delay, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, max_delay);
  for (double& a : actions) a = u(rng);
}

double ZeroDelayActor::act(std::span<const double>, Rng&,
                           std::span<double> action, std::span<double> raw) {
  zero_delay(action);
  zero_delay(raw);
  return 0.0;
}

double UniformRandomActor::act(std::span<const double>, Rng& rng,
                               std::span<double> action,
                               std::span<double> raw) {
  uniform_random(action, max_delay_, rng);
  std::copy(action.begin(), action.end(), raw.begin());
  return -static_cast<double>(action.size()) * std::log(max_delay_);
}

BatchMetrics evaluate_baseline(const EnvConfig& env, BaselinePolicy policy,
                               int days, std::uint64_t seed) {
  GridEnv grid(env);
  ZeroDelayActor zero;
  UniformRandomActor random(grid.config().step_hours);
  Actor* chosen = policy == BaselinePolicy::kZero
                      ? static_cast<Actor*>(&zero)
                      : static_cast<Actor*>(&random);
  std::vector<Actor*> actors(grid.n_agents(), chosen);
  Rng rng = make_stream(seed, 0, 0, StreamPurpose::kBaseline);
  const RolloutBatch b = rollout(grid, actors,
                                 days * grid.config().intervals_per_day, seed,
                                 rng);
  return compute_metrics(b);
}

double ecs_daily_energy(const sim::ApplianceSpec& spec, int intervals_per_day) {
  double total = 0.0;
  for (int h = 0; h < intervals_per_day; ++h) {
    total += spec.arrival_prob[h] * spec.mean_duration() * spec.power;
  }
  return total;
}

void EcsProblem::validate() const {
  if (coeffs.empty()) throw ConfigError("ECS problem has an empty horizon");
  if (caps.size() != coeffs.size()) {
    throw ConfigError("ECS caps must have one entry per interval");
  }
  if (!(daily_energy >= 0.0)) throw ConfigError("ECS daily_energy must be >= 0");
  double cap_total = 0.0;
  for (std::size_t h = 0; h < coeffs.size(); ++h) {
    if (!(coeffs[h] >= 0.0)) throw ConfigError("ECS coefficients must be >= 0");
    if (!(caps[h] >= 0.0)) throw ConfigError("ECS caps must be >= 0");
    cap_total += caps[h];
  }
  if (daily_energy > cap_total * (1.0 + 1e-12)) {
    throw ConfigError("ECS infeasible: daily_energy " +
                      std::to_string(daily_energy) +
                      " kWh exceeds total interval capacity " +
                      std::to_string(cap_total) + " kWh");
  }
}

std::vector<double> project_capped_simplex(std::span<const double> y,
                                           double total,
                                           std::span<const double> caps) {
  // x(tau) = clamp(y - tau, 0, cap) is non-increasing in tau; bisect on tau.
  auto mass = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      s += std::clamp(y[i] - tau, 0.0, caps[i]);
    }
    return s;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    lo = std::min(lo, y[i] - caps[i]);
    hi = std::max(hi, y[i]);
  }
  // mass(lo) = sum caps >= total, mass(hi) = 0 <= total
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mass(mid) > total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    x[i] = std::clamp(y[i] - hi, 0.0, caps[i]);
  }
  // Spread the bisection residue over coordinates with slack.
  double residue = total - mass(hi);
  for (std::size_t i = 0; i < x.size() && std::fabs(residue) > 0.0; ++i) {
    const double room = residue > 0.0 ? caps[i] - x[i] : -x[i];
    const double move = residue > 0.0 ? std::min(residue, room)
                                      : std::max(residue, room);
    x[i] += move;
    residue -= move;
  }
  return x;
}

namespace {

double kkt_residual(std::span<const double> x, std::span<const double> coeffs,
                    double total, std::span<const double> caps) {
  std::vector<double> y(x.size());
  for (std::size_t h = 0; h < x.size(); ++h) y[h] = x[h] - 2.0 * coeffs[h] * x[h];
  const auto p = project_capped_simplex(y, total, caps);
  double r = 0.0;
  for (std::size_t h = 0; h < x.size(); ++h) r = std::max(r, std::fabs(x[h] - p[h]));
  return r;
}

}  // namespace

EcsSolution ecs_solve(const EcsProblem& problem, double tolerance,
                      int max_iterations) {
  problem.validate();
  const int horizon = problem.horizon();
  const double lipschitz =
      2.0 * *std::max_element(problem.coeffs.begin(), problem.coeffs.end());
  std::vector<double> x = project_capped_simplex(
      std::vector<double>(horizon, problem.daily_energy / horizon),
      problem.daily_energy, problem.caps);
  EcsSolution sol;
  if (lipschitz > 0.0) {
    const double step = 1.0 / lipschitz;
    std::vector<double> y(horizon);
    for (int it = 0; it < max_iterations; ++it) {
      for (int h = 0; h < horizon; ++h) {
        y[h] = x[h] - step * 2.0 * problem.coeffs[h] * x[h];
      }
      auto next = project_capped_simplex(y, problem.daily_energy, problem.caps);
      double change = 0.0;
      for (int h = 0; h < horizon; ++h) {
        change = std::max(change, std::fabs(next[h] - x[h]));
      }
      x = std::move(next);
      sol.iterations = it + 1;
      if (change <= 0.1 * tolerance &&
          kkt_residual(x, problem.coeffs, problem.daily_energy, problem.caps) <=
              tolerance) {
        break;
      }
    }
  }
  sol.energy = x;
  for (int h = 0; h < horizon; ++h) {
    sol.objective += problem.coeffs[h] * x[h] * x[h];
  }
  sol.kkt_residual =
      kkt_residual(x, problem.coeffs, problem.daily_energy, problem.caps);
  return sol;
}

std::vector<EcsProblem> ecs_problems(const EnvConfig& env_in) {
  EnvConfig env = env_in;
  env.finalize();
  std::vector<EcsProblem> out;
  const int h = env.intervals_per_day;
  for (int n = 0; n < env.n_households; ++n) {
    EcsProblem p;
    p.coeffs.resize(h);
    for (int i = 0; i < h; ++i) p.coeffs[i] = env.quad_coeff(i);
    double cap = 0.0;
    for (const auto& spec : env.specs_for(n)) {
      p.daily_energy += ecs_daily_energy(spec, h);
      cap += spec.power * env.step_hours;
    }
    p.caps.assign(h, cap);
    out.push_back(std::move(p));
  }
  return out;
}

EcsSchedule ecs_schedule(const EnvConfig& env) {
  EcsSchedule s;
  for (const auto& p : ecs_problems(env)) s.energy.push_back(ecs_solve(p).energy);
  return s;
}

double ecs_planned_reward(const EcsSolution& s, double w) {
  double energy = 0.0;
  for (double e : s.energy) energy += e;
  return -s.objective + w * energy;
}

EcsEvaluation ecs_evaluate(const EcsSchedule& schedule, const EnvConfig& env_in,
                           int days, std::uint64_t seed) {
  EnvConfig env = env_in;
  env.finalize();
  const int n_house = env.n_households;
  const int h_count = env.intervals_per_day;
  if (schedule.energy.size() != static_cast<std::size_t>(n_house)) {
    throw ConfigError("ECS schedule must cover every household");
  }
  const sim::DurationModel durations{env.step_hours, env.fixed_durations};
  EcsEvaluation ev;
  ev.profile.mean_kwh.assign(h_count, 0.0);
  double reward = 0.0, cost = 0.0, fulfilled = 0.0, demanded = 0.0;
  double par_sum = 0.0;
  for (int n = 0; n < n_house; ++n) {
    if (schedule.energy[n].size() != static_cast<std::size_t>(h_count)) {
      throw ConfigError("ECS schedule must have one entry per interval");
    }
  }
  std::vector<sim::HouseholdStreams> streams;
  for (int n = 0; n < n_house; ++n) {
    const std::uint64_t owner = env.shared_household_streams ? 0 : n;
    streams.push_back(
        sim::HouseholdStreams::make(seed, owner, env.specs_for(n).size()));
  }
  for (int d = 0; d < days; ++d) {
    std::vector<double> aggregate(h_count, 0.0);
    std::vector<double> backlog(n_house, 0.0);
    for (int h = 0; h < h_count; ++h) {
      const double b = env.quad_coeff(h);
      for (int n = 0; n < n_house; ++n) {
        const auto& specs = env.specs_for(n);
        sim::HouseholdState house(specs.size());
        sim::sample_arrivals(house, specs, h, streams[n], durations);
        for (std::size_t m = 0; m < specs.size(); ++m) {
          for (double l : house.appliances[m].queued_durations()) {
            backlog[n] += l * specs[m].power;
            demanded += l * specs[m].power;
          }
        }
        const double used = std::min(schedule.energy[n][h], backlog[n]);
        backlog[n] -= used;
        const double c = b * used * used;
        cost += c;
        reward += -c + env.constraint_weight * used;
        fulfilled += used;
        aggregate[h] += used;
      }
    }
    double peak = 0.0, total = 0.0;
    for (int h = 0; h < h_count; ++h) {
      peak = std::max(peak, aggregate[h]);
      total += aggregate[h];
      ev.profile.mean_kwh[h] += aggregate[h] / days;
    }
    par_sum += total > 0.0 ? peak / (total / h_count) : 1.0;
  }
  const double household_days = static_cast<double>(days) * n_house;
  ev.avg_reward_per_day = reward / household_days;
  ev.avg_cost_per_day = cost / household_days;
  ev.avg_energy_per_day = fulfilled / household_days;
  ev.avg_demand_per_day = demanded / household_days;
  ev.par = days > 0 ? par_sum / days : 1.0;
  ev.fulfilled_pct = demanded > 0.0 ? 100.0 * fulfilled / demanded : 100.0;
  return ev;
}

}  // namespace gridflux::baselines

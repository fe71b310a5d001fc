// Acceptance suite: one PASS/FAIL line per criterion P1..P11. Arguments
// select a subset (e.g. `acceptance P1 P4`); no arguments runs everything.
// Exits 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gridflux/algos.hpp"
#include "gridflux/baselines.hpp"
#include "gridflux/env.hpp"
#include "gridflux/metrics.hpp"
#include "gridflux/pricing.hpp"
#include "gridflux/sim.hpp"
#include "gridflux/trainer.hpp"
#include "oracles/dynamics_case.hpp"
#include "oracles/gradcheck.hpp"
#include "oracles/grid_oracles.hpp"

using namespace gridflux;

namespace {

// Pinned thresholds.
constexpr int kGradNets = 100;
constexpr double kGradTol = 1e-4;
constexpr double kDynamicsTol = 1e-9;
constexpr int kDistSamples = 100000;
constexpr double kDurationMeanTol = 0.02;
constexpr double kScaleTol = 1e-12;
constexpr double kRatioTol = 1e-6;
constexpr int kEcsInstances = 50;
constexpr int kEcsMaxHorizon = 6;
constexpr double kEcsGridStep = 1e-3;
constexpr double kEcsObjectiveTol = 1e-6;
constexpr double kKktTol = 1e-6;
constexpr int kLearnIterations = 150;
constexpr std::uint64_t kLearnSeeds[] = {1, 2};
constexpr double kCostRatioTarget = 0.90;
constexpr int kFinalWindow = 10;
constexpr int kPeakWindow = 5;
constexpr int kEcsIterations = 150;
constexpr int kEcsDays = 105;
constexpr double kEcsAspiration = 1.10;
constexpr int kRaceIterations = 20;
constexpr std::uint64_t kRaceSeeds[] = {1, 2, 3};
constexpr int kShareWindow = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double tail_mean(const std::vector<double>& v, int n) {
  const auto k = std::min<std::size_t>(n, v.size());
  return std::accumulate(v.end() - k, v.end(), 0.0) / static_cast<double>(k);
}

// Baseline metrics on exactly the demand a learner saw in that batch.
BatchMetrics paired_baseline(GridEnv& env, Actor& actor, int steps,
                             std::uint64_t batch_seed) {
  std::vector<Actor*> actors(env.n_agents(), &actor);
  Rng rng(splitmix64(batch_seed ^ 0x6a09e667f3bcc909ULL));
  return compute_metrics(rollout(env, actors, steps, batch_seed, rng));
}

struct TrainTrace {
  std::vector<double> cost, reward, peak;
};

TrainTrace train_trace(const EnvConfig& env, const TrainConfig& tc,
                       std::uint64_t seed, int iterations,
                       const std::function<void(const Trainer&)>& after = {}) {
  Trainer trainer(env, tc, seed);
  TrainTrace t;
  for (int i = 0; i < iterations; ++i) {
    const auto r = trainer.run_iteration();
    t.cost.push_back(r.batch.metrics.avg_cost_per_day);
    t.reward.push_back(r.batch.metrics.avg_reward_per_day);
    t.peak.push_back(r.batch.profile.peak());
    if (after) after(trainer);
  }
  return t;
}

TrainConfig algo_config(const std::string& algo) {
  TrainConfig tc;
  if (algo == "dppo") tc.critic_mode = CriticMode::kDecentral;
  if (algo == "a2c") {
    tc.algo = Algo::kA2c;
    tc.critic_mode = CriticMode::kDecentral;
  }
  return tc;
}

// --- property suites -------------------------------------------------------

Outcome p1_gradients() {
  const auto rep = oracle::run_gradcheck(kGradNets, 20240601);
  return {rep.nets == kGradNets && rep.max_rel_err < kGradTol,
          fmt("%d nets, %ld partials, max relative error %.3g (< %g)", rep.nets,
              rep.checked, rep.max_rel_err, kGradTol)};
}

Outcome p2_dynamics() {
  const auto r = oracle::run_dynamics_case();
  const bool ok = r.max_energy_err <= kDynamicsTol && r.max_ttf_err <= kDynamicsTol &&
                  r.queue_mismatches == 0 && r.flag_mismatches == 0 &&
                  r.completion_mismatches == 0 && r.checked_steps == 2 * 20;
  return {ok, fmt("%d household-steps, energy err %.2g, time-to-free err %.2g, queue/flag/"
                  "completion mismatches %d/%d/%d (tol %g)",
                  r.checked_steps, r.max_energy_err, r.max_ttf_err,
                  r.queue_mismatches, r.flag_mismatches, r.completion_mismatches,
                  kDynamicsTol)};
}

Outcome p3_distributions() {
  bool ok = true;
  double worst_sigma = 0.0;
  for (double p : {0.02, 0.3, 0.75}) {
    sim::ApplianceSpec s;
    s.name = "probe";
    s.arrival_prob.assign(48, p);
    sim::HouseholdState h(1);
    auto streams = sim::HouseholdStreams::make(77, 0, 1);
    const sim::DurationModel dm{0.5, false};
    for (int k = 0; k < kDistSamples; ++k) {
      sim::sample_arrivals(h, {&s, 1}, k % 48, streams, dm);
    }
    const double freq = static_cast<double>(h.tasks_arrived_cum) / kDistSamples;
    const double z = std::fabs(freq - p) / std::sqrt(p * (1 - p) / kDistSamples);
    worst_sigma = std::max(worst_sigma, z);
    ok = ok && z <= 3.0;
  }
  double worst_rel = 0.0;
  const double T = 0.5;
  for (const auto& spec : default_appliances(48, T)) {
    Rng rng(make_stream(5, 0, 0, StreamPurpose::kDuration));
    double sum = 0.0;
    for (int i = 0; i < kDistSamples; ++i) {
      sum += sim::sample_duration(spec.duration_rate, T, rng);
    }
    const double want = oracle::clamped_exponential_mean(spec.duration_rate, T);
    worst_rel = std::max(worst_rel, std::fabs(sum / kDistSamples - want) / want);
  }
  ok = ok && worst_rel <= kDurationMeanTol;
  return {ok, fmt("arrival deviation %.2f sigma (<= 3), clamped-exponential mean "
                  "rel err %.4f (<= %.2f), %d samples each",
                  worst_sigma, worst_rel, kDurationMeanTol, kDistSamples)};
}

Outcome p4_pricing() {
  bool flat = true;
  for (double T : {0.5, 1.0, 0.25}) {
    for (double level : {0.3, 2.0, 7.77}) {
      pricing::PriceWindow w(48);
      for (int i = 0; i < 48; ++i) w.push(level);
      flat = flat && pricing::par_price(w, T) == T;
    }
  }
  double worst_scale = 0.0;
  Rng rng(9);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(20 + trial % 40);
    for (auto& x : xs) x = u(rng);
    for (double c : {0.1, 10.0}) {
      pricing::PriceWindow a(48), b(48);
      for (double x : xs) {
        a.push(x);
        b.push(c * x);
      }
      const double pa = pricing::par_price(a, 0.5);
      worst_scale = std::max(worst_scale, std::fabs(pricing::par_price(b, 0.5) - pa) / pa);
    }
  }
  EnvConfig cfg;
  GridEnv env(cfg);
  env.reset(3);
  Rng arng(4);
  std::uniform_real_distribution<double> d(0.0, cfg.step_hours);
  std::vector<double> joint(cfg.n_households * env.n_appliances());
  long checked = 0, exact = 0;
  while (!env.done()) {
    for (auto& a : joint) a = d(arng);
    const auto r = env.step(joint);
    for (int n = 0; n < cfg.n_households; ++n) {
      const double e = r.info.energy[n];
      ++checked;
      if (r.rewards[n] == -(r.info.price[n] * e) + cfg.constraint_weight * e) ++exact;
    }
  }
  const bool ok = flat && worst_scale <= kScaleTol && exact == checked;
  return {ok, fmt("flat window = T exactly: %s; scale invariance rel err %.2g "
                  "(<= %g); reward identity exact on %ld/%ld household-steps",
                  flat ? "yes" : "no", worst_scale, kScaleTol, exact, checked)};
}

Outcome p5_ppo() {
  EnvConfig env;
  TrainConfig tc;
  Trainer trainer(env, tc, 11);
  double dev = 0.0;
  for (int i = 0; i < 2; ++i) dev = std::max(dev, trainer.run_iteration().first_max_ratio_dev);
  const double a = 1.7;
  const bool branches = algos::ppo_objective(1.0, a, 0.2, 0.0, 0.0) == a &&
                        algos::ppo_objective(2.0, a, 0.2, 0.0, 0.0) == 1.2 * a &&
                        algos::ppo_objective(0.5, -a, 0.2, 0.0, 0.0) == -0.8 * a;
  return {dev <= kRatioTol && branches,
          fmt("first-minibatch max |rho-1| %.2g (<= %g); rho in {1,2,0.5} gives "
              "{A, 1.2A, -0.8|A|}: %s",
              dev, kRatioTol, branches ? "exact" : "mismatch")};
}

Outcome p6_ecs() {
  Rng rng(2718);
  std::uniform_int_distribution<int> horizon(2, kEcsMaxHorizon);
  std::uniform_real_distribution<double> coeff(0.1, 1.0), frac(0.2, 0.8);
  std::uniform_int_distribution<int> cap_units(200, 1000);
  double worst_obj = 0.0, worst_kkt = 0.0;
  int interior_sets = 0;
  for (int t = 0; t < kEcsInstances; ++t) {
    baselines::EcsProblem p;
    const int h = horizon(rng);
    double cap_total = 0.0;
    for (int i = 0; i < h; ++i) {
      p.coeffs.push_back(coeff(rng));
      p.caps.push_back(cap_units(rng) * kEcsGridStep);
      cap_total += p.caps.back();
    }
    p.daily_energy = std::round(frac(rng) * cap_total / kEcsGridStep) * kEcsGridStep;
    const auto s = baselines::ecs_solve(p, 1e-12);
    const double brute =
        oracle::ecs_grid_minimum(p.coeffs, p.daily_energy, p.caps, kEcsGridStep);
    worst_obj = std::max(worst_obj, std::fabs(s.objective - brute));
    std::vector<double> marginals;
    for (int i = 0; i < h; ++i) {
      if (s.energy[i] > 1e-9 && s.energy[i] < p.caps[i] - 1e-9) {
        marginals.push_back(2.0 * p.coeffs[i] * s.energy[i]);
      }
    }
    if (marginals.size() >= 2) {
      ++interior_sets;
      const auto [lo, hi] = std::minmax_element(marginals.begin(), marginals.end());
      worst_kkt = std::max(worst_kkt, *hi - *lo);
    }
  }
  return {worst_obj <= kEcsObjectiveTol && worst_kkt <= kKktTol,
          fmt("%d instances (H <= %d), max |solver - grid| %.3g (<= %g); "
              "equal-marginal spread %.2g on %d instances (<= %g)",
              kEcsInstances, kEcsMaxHorizon, worst_obj, kEcsObjectiveTol,
              worst_kkt, interior_sets, kKktTol)};
}

// --- learning experiments --------------------------------------------------

struct LearnResult {
  std::vector<double> cost_ratio, reward, zero_reward, random_reward;
  std::vector<double> peak, zero_peak;
};

LearnResult run_learning() {
  LearnResult out;
  EnvConfig env;
  env.finalize();
  const TrainConfig tc;
  GridEnv baseline_env(env);
  baselines::ZeroDelayActor zero;
  baselines::UniformRandomActor random(env.step_hours);
  for (std::uint64_t seed : kLearnSeeds) {
    const auto trace = train_trace(env, tc, seed, kLearnIterations);
    std::vector<double> zc, zr, rr, zp;
    for (int it = kLearnIterations - kFinalWindow + 1; it <= kLearnIterations; ++it) {
      const auto bs = training_batch_seed(seed, it);
      const auto z = paired_baseline(baseline_env, zero, tc.rollout_steps, bs);
      const auto r = paired_baseline(baseline_env, random, tc.rollout_steps, bs);
      zc.push_back(z.metrics.avg_cost_per_day);
      zr.push_back(z.metrics.avg_reward_per_day);
      rr.push_back(r.metrics.avg_reward_per_day);
      zp.push_back(z.profile.peak());
    }
    out.cost_ratio.push_back(tail_mean(trace.cost, kFinalWindow) / mean(zc));
    out.reward.push_back(tail_mean(trace.reward, kFinalWindow));
    out.zero_reward.push_back(mean(zr));
    out.random_reward.push_back(mean(rr));
    out.peak.push_back(tail_mean(trace.peak, kPeakWindow));
    out.zero_peak.push_back(tail_mean(zp, kPeakWindow));
    std::printf("  seed %llu: cost ratio %.4f, reward %.3f (zero %.3f, random "
                "%.3f), peak %.3f (zero %.3f)\n",
                static_cast<unsigned long long>(seed), out.cost_ratio.back(),
                out.reward.back(), out.zero_reward.back(),
                out.random_reward.back(), out.peak.back(), out.zero_peak.back());
    std::fflush(stdout);
  }
  return out;
}

const LearnResult& learning() {
  static const LearnResult r = run_learning();
  return r;
}

Outcome p7_learning() {
  const auto& r = learning();
  const double ratio = mean(r.cost_ratio);
  const double reward = mean(r.reward);
  const double zero = mean(r.zero_reward), random = mean(r.random_reward);
  const bool ok = ratio <= kCostRatioTarget && reward > zero && reward > random;
  return {ok, fmt("MAPPO, %zu seeds x %d iterations: final-%d cost / zero-delay "
                  "cost %.4f (<= %.2f); final reward %.3f vs zero-delay %.3f and "
                  "random %.3f (must exceed both)",
                  r.cost_ratio.size(), kLearnIterations, kFinalWindow, ratio,
                  kCostRatioTarget, reward, zero, random)};
}

Outcome p8_peaks() {
  const auto& r = learning();
  const double trained = mean(r.peak), zero = mean(r.zero_peak);
  return {trained < zero,
          fmt("final-%d mean daily peak %.4f kWh vs zero-delay %.4f kWh (strictly "
              "below)",
              kPeakWindow, trained, zero)};
}

Outcome p9_ecs_comparison() {
  const EnvConfig env = ecs_comparison_env();
  TrainConfig tc;
  tc.gamma = 0.9;
  tc.actor_lr = 1e-3;
  const auto trace = train_trace(env, tc, 1, kEcsIterations);
  const double mappo = tail_mean(trace.reward, kFinalWindow);
  const auto ev = baselines::ecs_evaluate(baselines::ecs_schedule(env), env, kEcsDays, 1);
  const double ratio = mappo / ev.avg_reward_per_day;
  return {mappo >= ev.avg_reward_per_day,
          fmt("MAPPO final-%d reward/day %.3f vs ECS %.3f over %d days (>=); "
              "ratio %.4f, aspirational > %.2f: %s",
              kFinalWindow, mappo, ev.avg_reward_per_day, kEcsDays, ratio,
              kEcsAspiration, ratio > kEcsAspiration ? "met" : "not met")};
}

// Iterations until each algorithm first matches the paired zero-delay cost,
// also reused by the sharing check.
struct RaceResult {
  std::map<std::string, std::vector<int>> reach;       // at zero-delay level
  std::map<std::string, std::vector<int>> reach_90;    // at 0.9x that level
  std::vector<double> unshared_final;
};

RaceResult run_race() {
  RaceResult out;
  EnvConfig env;
  env.finalize();
  GridEnv baseline_env(env);
  baselines::ZeroDelayActor zero;
  const int steps = TrainConfig{}.rollout_steps;
  for (std::uint64_t seed : kRaceSeeds) {
    std::vector<double> zero_cost;
    for (int it = 1; it <= kRaceIterations; ++it) {
      zero_cost.push_back(
          paired_baseline(baseline_env, zero, steps, training_batch_seed(seed, it))
              .metrics.avg_cost_per_day);
    }
    for (const std::string algo : {"mappo", "dppo", "a2c"}) {
      const auto trace = train_trace(env, algo_config(algo), seed, kRaceIterations);
      auto first = [&](double level) {
        for (int i = 0; i < kRaceIterations; ++i) {
          if (trace.cost[i] <= level * zero_cost[i]) return i + 1;
        }
        return kRaceIterations + 1;
      };
      out.reach[algo].push_back(first(1.0));
      out.reach_90[algo].push_back(first(0.9));
      if (algo == "mappo") out.unshared_final.push_back(tail_mean(trace.reward, kShareWindow));
      std::printf("  seed %llu %-5s: reaches zero-delay cost at iteration %d, "
                  "0.9x at %d\n",
                  static_cast<unsigned long long>(seed), algo.c_str(),
                  out.reach[algo].back(), out.reach_90[algo].back());
      std::fflush(stdout);
    }
  }
  return out;
}

const RaceResult& race() {
  static const RaceResult r = run_race();
  return r;
}

Outcome p10_ordering() {
  const auto& r = race();
  auto ordered = [&](const std::map<std::string, std::vector<int>>& m) {
    int n = 0;
    for (std::size_t s = 0; s < std::size(kRaceSeeds); ++s) {
      if (m.at("mappo")[s] <= m.at("dppo")[s] && m.at("dppo")[s] <= m.at("a2c")[s]) ++n;
    }
    return n;
  };
  const int n = ordered(r.reach), n90 = ordered(r.reach_90);
  return {n >= 2, fmt("MAPPO <= DPPO <= A2C iterations-to-zero-delay-cost on %d of "
                      "%zu seeds (>= 2; budget %d, unreached = %d); at the 0.9x "
                      "level: %d of %zu",
                      n, std::size(kRaceSeeds), kRaceIterations, kRaceIterations + 1,
                      n90, std::size(kRaceSeeds))};
}

Outcome p11_sharing() {
  const auto& r = race();
  EnvConfig env;
  TrainConfig tc;
  tc.policy_groups = paired_policy_groups(env.n_households);
  bool identical = true;
  bool updated = true;
  int checks = 0;
  std::vector<double> shared_final;
  for (std::uint64_t seed : kRaceSeeds) {
    std::vector<double> prev;
    const auto trace = train_trace(env, tc, seed, kRaceIterations, [&](const Trainer& t) {
      for (int h = 0; h + 1 < env.n_households; h += 2) {
        const auto& a = t.policy(t.policy_of(h));
        const auto& b = t.policy(t.policy_of(h + 1));
        const auto pa = a.mean_net().params(), pb = b.mean_net().params();
        identical = identical && std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()) &&
                    a.log_std() == b.log_std();
        ++checks;
      }
      const auto p0 = t.policy(0).mean_net().params();
      std::vector<double> now(p0.begin(), p0.end());
      updated = updated && now != prev;
      prev = std::move(now);
    });
    shared_final.push_back(tail_mean(trace.reward, kShareWindow));
  }
  const auto [lo, hi] =
      std::minmax_element(r.unshared_final.begin(), r.unshared_final.end());
  const double shared = mean(shared_final);
  const bool inside = shared >= *lo && shared <= *hi;
  return {identical && updated && inside,
          fmt("paired parameters bit-identical on %d/%d post-update checks, "
              "updates applied: %s; shared final-%d reward %.3f within unshared "
              "envelope [%.3f, %.3f]",
              identical ? checks : 0, checks, updated ? "yes" : "no", kShareWindow,
              shared, *lo, *hi)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"P1", p1_gradients},  {"P2", p2_dynamics},       {"P3", p3_distributions},
      {"P4", p4_pricing},    {"P5", p5_ppo},            {"P6", p6_ecs},
      {"P7", p7_learning},   {"P8", p8_peaks},          {"P9", p9_ecs_comparison},
      {"P10", p10_ordering}, {"P11", p11_sharing}};
  std::set<std::string> selected(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!selected.empty() && !selected.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s %s [%.1f s]\n", name.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

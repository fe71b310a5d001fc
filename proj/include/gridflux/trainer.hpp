#pragma once

// Actor-critic training loop: rollout, critic evaluation, one-step
// advantages, critic regression, then per-policy actor updates (PPO or A2C).
// Households in the same policy group share one network trained on their
// pooled transitions.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "gridflux/algos.hpp"
#include "gridflux/config.hpp"
#include "gridflux/env.hpp"
#include "gridflux/metrics.hpp"
#include "gridflux/nn/checkpoint.hpp"

namespace gridflux {

struct IterationResult {
  BatchMetrics batch;
  std::vector<double> critic_losses;
  double first_max_ratio_dev = 0.0;  // max over policies
};

// Demand seed of the rollout collected in `iteration` (1-based). Baselines
// replayed with it see exactly the arrivals the learners saw.
std::uint64_t training_batch_seed(std::uint64_t seed, int iteration);

class Trainer {
 public:
  Trainer(EnvConfig env, TrainConfig train, std::uint64_t seed);

  // Collects one batch and updates critic and actors. Throws DivergenceError
  // with the iteration index on non-finite values.
  IterationResult run_iteration();

  using Callback = std::function<void(const IterationResult&)>;
  std::vector<IterationResult> train(int iterations, const Callback& cb = {});

  int iteration() const { return iteration_; }
  std::uint64_t seed() const { return seed_; }
  const EnvConfig& env_config() const { return env_.config(); }
  const TrainConfig& train_config() const { return cfg_; }
  int n_policies() const { return static_cast<int>(policies_.size()); }
  int policy_of(int household) const { return groups_[household]; }
  const nn::GaussianPolicy& policy(int group) const { return policies_[group]; }
  nn::GaussianPolicy& policy(int group) { return policies_[group]; }
  const algos::ValueEstimator& critic() const { return *critic_; }

  nn::Checkpoint checkpoint() const;
  void restore(const nn::Checkpoint& ck);

 private:
  EnvConfig env_config_;
  GridEnv env_;
  TrainConfig cfg_;
  std::uint64_t seed_;
  std::vector<int> groups_;
  std::vector<nn::GaussianPolicy> policies_;
  std::vector<algos::PolicyOptimizer> optimizers_;
  std::unique_ptr<algos::ValueEstimator> critic_;
  Rng policy_rng_;
  Rng update_rng_;
  int iteration_ = 0;
  std::chrono::steady_clock::time_point start_;
};

// Rollout actor that samples from a Gaussian policy.
class PolicyActor final : public Actor {
 public:
  explicit PolicyActor(const nn::GaussianPolicy& p) : policy_(&p) {}
  double act(std::span<const double> obs, Rng& rng, std::span<double> action,
             std::span<double> raw) override {
    return policy_->sample(obs, rng, action, raw);
  }

 private:
  const nn::GaussianPolicy* policy_;
};

// Deterministic variant (clipped mean), for evaluation.
class GreedyPolicyActor final : public Actor {
 public:
  explicit GreedyPolicyActor(const nn::GaussianPolicy& p) : policy_(&p) {}
  double act(std::span<const double> obs, Rng&, std::span<double> action,
             std::span<double> raw) override {
    policy_->act_greedy(obs, action);
    std::copy(action.begin(), action.end(), raw.begin());
    return 0.0;
  }

 private:
  const nn::GaussianPolicy* policy_;
};

}  // namespace gridflux

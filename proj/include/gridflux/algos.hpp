#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gridflux/config.hpp"
#include "gridflux/nn/adam.hpp"
#include "gridflux/nn/critic.hpp"
#include "gridflux/nn/policy.hpp"
#include "gridflux/rollout.hpp"

namespace gridflux::algos {

// One-step TD residual r + gamma * V' * (1 - done) - V.
double advantage(double reward, double v_next, double v_now, double gamma,
                 bool done);

// min(rho A, clip(rho, 1-eps, 1+eps) A) + entropy_coeff * H
double ppo_objective(double ratio, double adv, double clip_eps, double entropy,
                     double entropy_coeff);

// d/d(rho) of the clipped term: A where the unclipped branch is the active
// minimum, 0 where the clipped constant is.
double ppo_objective_ratio_grad(double ratio, double adv, double clip_eps);

// In place: zero mean, unit variance (variance floor 1e-8).
void normalize(std::span<double> values);

// Index of one agent-transition inside a RolloutBatch.
struct Sample {
  int step;
  int agent;
};

// Value function over the batch, either one centralized network queried per
// household or one decentralized network per household.
class ValueEstimator {
 public:
  virtual ~ValueEstimator() = default;
  virtual double value(const RolloutBatch& b, int k, int n) const = 0;
  // V of the successor state of step k (used for time-limit bootstrapping).
  virtual double next_value(const RolloutBatch& b, int k, int n) const = 0;
  // One optimizer step on mean squared error; returns the loss before the
  // step.
  virtual double fit_step(const RolloutBatch& b, std::span<const Sample> samples,
                          std::span<const double> targets) = 0;
  virtual std::size_t param_count() const = 0;
};

class CentralValue final : public ValueEstimator {
 public:
  CentralValue(nn::CentralCritic critic, nn::AdamOptions opt,
               double max_grad_norm);
  double value(const RolloutBatch& b, int k, int n) const override;
  double next_value(const RolloutBatch& b, int k, int n) const override;
  double fit_step(const RolloutBatch& b, std::span<const Sample> samples,
                  std::span<const double> targets) override;
  std::size_t param_count() const override { return critic_.param_count(); }
  nn::CentralCritic& critic() { return critic_; }
  const nn::CentralCritic& critic() const { return critic_; }

 private:
  nn::CentralCritic critic_;
  std::vector<nn::Adam> adams_;  // own, others, merge
  double max_grad_norm_;
};

class DecentralValue final : public ValueEstimator {
 public:
  DecentralValue(std::vector<nn::DecentralCritic> critics, nn::AdamOptions opt,
                 double max_grad_norm);
  double value(const RolloutBatch& b, int k, int n) const override;
  double next_value(const RolloutBatch& b, int k, int n) const override;
  double fit_step(const RolloutBatch& b, std::span<const Sample> samples,
                  std::span<const double> targets) override;
  std::size_t param_count() const override;
  std::vector<nn::DecentralCritic>& critics() { return critics_; }
  const std::vector<nn::DecentralCritic>& critics() const { return critics_; }

 private:
  std::vector<nn::DecentralCritic> critics_;
  std::vector<nn::Adam> adams_;
  double max_grad_norm_;
};

// V(s(k)) for every (k, n), step-major.
std::vector<double> evaluate_values(const ValueEstimator& critic,
                                    const RolloutBatch& b);

struct AdvantageTargets {
  std::vector<double> advantages;  // [k][n], unnormalized
  std::vector<double> targets;     // [k][n], y = r + gamma V'
  std::vector<double> next_values; // [k][n], frozen V'
};

// Uses the frozen values of step k+1 as V' inside an episode; at episode ends
// V' is 0, or the critic's estimate of the successor when bootstrapping.
AdvantageTargets compute_targets(const ValueEstimator& critic,
                                 const RolloutBatch& b,
                                 std::span<const double> values, double gamma,
                                 double reward_scale, bool bootstrap_time_limit);

// Runs `steps` optimizer steps on shuffled minibatches of all (k, n) pairs.
// Returns the loss of each step.
std::vector<double> critic_update(ValueEstimator& critic, const RolloutBatch& b,
                                  std::span<const double> targets, int steps,
                                  int minibatch_size, Rng& rng);

// Optimizer state for one policy: mean network and log-std blocks.
struct PolicyOptimizer {
  nn::Adam net;
  nn::Adam log_std;

  PolicyOptimizer() = default;
  PolicyOptimizer(const nn::GaussianPolicy& p, double lr);
};

struct ActorUpdateStats {
  double first_max_ratio_dev = 0.0;  // max |rho - 1| on the first minibatch
  double mean_objective = 0.0;       // of the last minibatch
  int minibatches = 0;
};

// Mean clipped surrogate plus entropy bonus over `samples`, and its gradient
// (accumulated into the two blocks when non-empty). old_log_probs are the
// behaviour log-probs, advantages aligned with samples.
double ppo_surrogate(const nn::GaussianPolicy& policy, const RolloutBatch& b,
                     std::span<const Sample> samples,
                     std::span<const double> advantages,
                     std::span<const double> old_log_probs, double clip_eps,
                     double entropy_coeff, std::span<double> net_grad,
                     std::span<double> log_std_grad,
                     double* max_ratio_dev = nullptr);

// Mean log pi(a|o) * A plus entropy bonus, and its gradient.
double pg_surrogate(const nn::GaussianPolicy& policy, const RolloutBatch& b,
                    std::span<const Sample> samples,
                    std::span<const double> advantages, double entropy_coeff,
                    std::span<double> net_grad, std::span<double> log_std_grad);

// epochs_per_iter passes over shuffled minibatches, ascending the PPO
// surrogate. Throws DivergenceError on non-finite objective or parameters.
ActorUpdateStats ppo_actor_update(nn::GaussianPolicy& policy,
                                  PolicyOptimizer& opt, const RolloutBatch& b,
                                  std::span<const Sample> samples,
                                  std::span<const double> advantages,
                                  const TrainConfig& cfg, Rng& rng);

// Vanilla policy-gradient ascent: one pass over consecutive minibatches,
// no clipping and no reuse.
ActorUpdateStats a2c_actor_update(nn::GaussianPolicy& policy,
                                  PolicyOptimizer& opt, const RolloutBatch& b,
                                  std::span<const Sample> samples,
                                  std::span<const double> advantages,
                                  const TrainConfig& cfg);

}  // namespace gridflux::algos

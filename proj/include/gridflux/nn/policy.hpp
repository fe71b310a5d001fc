#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridflux/nn/mlp.hpp"
#include "gridflux/rng.hpp"

namespace gridflux::nn {

// Diagonal Gaussian over M start delays. The mean is squashed into the
// action range as (T/2)(1 + tanh(z)); log-std is state independent. Samples
// are clipped to [0, T] and scored with the pre-clip density.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, int n_actions, double max_delay, int hidden,
                 Rng& init_rng);
  GaussianPolicy(MlpNet mean_net, std::vector<double> log_std,
                 double max_delay);

  int obs_dim() const { return mean_net_.in_dim(); }
  int n_actions() const { return mean_net_.out_dim(); }
  double max_delay() const { return max_delay_; }

  MlpNet& mean_net() { return mean_net_; }
  const MlpNet& mean_net() const { return mean_net_; }
  std::vector<double>& log_std() { return log_std_; }
  const std::vector<double>& log_std() const { return log_std_; }

  void mean(std::span<const double> obs, std::span<double> out) const;

  // Writes the clipped action and the raw (pre-clip) sample; returns the
  // log-density of the raw sample.
  double sample(std::span<const double> obs, Rng& rng,
                std::span<double> action, std::span<double> raw) const;
  // Deterministic action: the clipped mean.
  void act_greedy(std::span<const double> obs, std::span<double> action) const;

  // A non-empty `mask` restricts the density to components with mask != 0.
  using Mask = std::span<const std::uint8_t>;

  double log_prob(std::span<const double> obs, std::span<const double> raw,
                  Mask mask = {}) const;

  // Forward pass kept in `cache` for a later backward_log_prob.
  double log_prob(std::span<const double> obs, std::span<const double> raw,
                  MlpNet::Cache& cache, Mask mask = {}) const;
  // Accumulates coeff * d(log pi(raw|obs))/d(params) at the cached pass.
  void backward_log_prob(const MlpNet::Cache& cache,
                         std::span<const double> raw, double coeff,
                         std::span<double> net_grad,
                         std::span<double> log_std_grad, Mask mask = {}) const;

  // Accumulates coeff * d(log pi(raw|obs))/d(params) into the two gradient
  // blocks; returns log pi(raw|obs).
  double accumulate_log_prob_grad(std::span<const double> obs,
                                  std::span<const double> raw, double coeff,
                                  std::span<double> net_grad,
                                  std::span<double> log_std_grad,
                                  Mask mask = {}) const;

  // Differential entropy of the (unclipped) Gaussian.
  double entropy() const;

  bool all_finite() const;

 private:
  MlpNet mean_net_;
  std::vector<double> log_std_;
  double max_delay_ = 0.5;
};

double gaussian_entropy(std::span<const double> log_std);

}  // namespace gridflux::nn

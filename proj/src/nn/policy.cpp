#include "gridflux/nn/policy.hpp"

#include <algorithm>
#include <cmath>

namespace gridflux::nn {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

}  // namespace

GaussianPolicy::GaussianPolicy(int obs_dim, int n_actions, double max_delay,
                               int hidden, Rng& init_rng)
    : mean_net_({obs_dim, hidden, hidden, n_actions}),
      log_std_(n_actions, std::log(max_delay / 4.0)),
      max_delay_(max_delay) {
  mean_net_.init(init_rng, 0.01);
}

GaussianPolicy::GaussianPolicy(MlpNet mean_net, std::vector<double> log_std,
                               double max_delay)
    : mean_net_(std::move(mean_net)),
      log_std_(std::move(log_std)),
      max_delay_(max_delay) {}

void GaussianPolicy::mean(std::span<const double> obs,
                          std::span<double> out) const {
  mean_net_.forward(obs, out);
  for (double& z : out) z = 0.5 * max_delay_ * (1.0 + std::tanh(z));
}

double GaussianPolicy::sample(std::span<const double> obs, Rng& rng,
                              std::span<double> action,
                              std::span<double> raw) const {
  mean(obs, raw);
  std::normal_distribution<double> normal(0.0, 1.0);
  double logp = 0.0;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const double eps = normal(rng);
    raw[j] += std::exp(log_std_[j]) * eps;
    logp += -0.5 * eps * eps - log_std_[j] - kHalfLog2Pi;
    action[j] = std::clamp(raw[j], 0.0, max_delay_);
  }
  return logp;
}

void GaussianPolicy::act_greedy(std::span<const double> obs,
                                std::span<double> action) const {
  mean(obs, action);
  for (double& a : action) a = std::clamp(a, 0.0, max_delay_);
}

double GaussianPolicy::log_prob(std::span<const double> obs,
                                std::span<const double> raw,
                                Mask mask) const {
  MlpNet::Cache cache;
  return log_prob(obs, raw, cache, mask);
}

double GaussianPolicy::log_prob(std::span<const double> obs,
                                std::span<const double> raw,
                                MlpNet::Cache& cache, Mask mask) const {
  mean_net_.forward(obs, cache);
  const auto& pre = cache.activations.back();
  double logp = 0.0;
  for (std::size_t j = 0; j < pre.size(); ++j) {
    if (!mask.empty() && !mask[j]) continue;
    const double mu = 0.5 * max_delay_ * (1.0 + std::tanh(pre[j]));
    const double z = (raw[j] - mu) * std::exp(-log_std_[j]);
    logp += -0.5 * z * z - log_std_[j] - kHalfLog2Pi;
  }
  return logp;
}

void GaussianPolicy::backward_log_prob(const MlpNet::Cache& cache,
                                       std::span<const double> raw,
                                       double coeff, std::span<double> net_grad,
                                       std::span<double> log_std_grad,
                                       Mask mask) const {
  const auto& pre = cache.activations.back();
  std::vector<double> dz(pre.size(), 0.0);
  for (std::size_t j = 0; j < pre.size(); ++j) {
    if (!mask.empty() && !mask[j]) continue;
    const double th = std::tanh(pre[j]);
    const double mu = 0.5 * max_delay_ * (1.0 + th);
    const double inv_var = std::exp(-2.0 * log_std_[j]);
    const double diff = raw[j] - mu;
    // d logp / d mu, then through the squash
    dz[j] = coeff * diff * inv_var * 0.5 * max_delay_ * (1.0 - th * th);
    log_std_grad[j] += coeff * (diff * diff * inv_var - 1.0);
  }
  mean_net_.backward(cache, dz, net_grad);
}

double GaussianPolicy::accumulate_log_prob_grad(
    std::span<const double> obs, std::span<const double> raw, double coeff,
    std::span<double> net_grad, std::span<double> log_std_grad,
    Mask mask) const {
  MlpNet::Cache cache;
  const double logp = log_prob(obs, raw, cache, mask);
  backward_log_prob(cache, raw, coeff, net_grad, log_std_grad, mask);
  return logp;
}

double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double s : log_std) h += 0.5 + kHalfLog2Pi + s;
  return h;
}

double GaussianPolicy::entropy() const { return gaussian_entropy(log_std_); }

bool GaussianPolicy::all_finite() const {
  return mean_net_.all_finite() &&
         std::all_of(log_std_.begin(), log_std_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace gridflux::nn

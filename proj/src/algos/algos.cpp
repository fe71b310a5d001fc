#include "gridflux/algos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gridflux/errors.hpp"

namespace gridflux::algos {

double advantage(double reward, double v_next, double v_now, double gamma,
                 bool done) {
  return reward + (done ? 0.0 : gamma * v_next) - v_now;
}

double ppo_objective(double ratio, double adv, double clip_eps, double entropy,
                     double entropy_coeff) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * adv, clipped * adv) + entropy_coeff * entropy;
}

double ppo_objective_ratio_grad(double ratio, double adv, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return ratio * adv <= clipped * adv ? adv : 0.0;
}

void normalize(std::span<double> values) {
  if (values.empty()) return;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(std::max(var / n, 1e-8));
  for (double& v : values) v = (v - mean) / sd;
}

// --- critics ---------------------------------------------------------------

CentralValue::CentralValue(nn::CentralCritic critic, nn::AdamOptions opt,
                           double max_grad_norm)
    : critic_(std::move(critic)), max_grad_norm_(max_grad_norm) {
  for (std::size_t i = 0; i < 3; ++i) {
    adams_.emplace_back(critic_.block_size(i), opt);
  }
}

double CentralValue::value(const RolloutBatch& b, int k, int n) const {
  return critic_.value(b.state_at(k), b.extras_at(k, n), n);
}

double CentralValue::next_value(const RolloutBatch& b, int k, int n) const {
  return critic_.value(b.next_state_at(k), b.next_extras_at(k, n), n);
}

double CentralValue::fit_step(const RolloutBatch& b,
                              std::span<const Sample> samples,
                              std::span<const double> targets) {
  std::vector<double> grad(critic_.param_count(), 0.0);
  nn::CentralCritic::Cache cache;
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [k, n] = samples[i];
    const double v = critic_.value(b.state_at(k), b.extras_at(k, n), n, cache);
    const double err = v - targets[i];
    loss += err * err * scale;
    critic_.backward(cache, 2.0 * err * scale, grad);
  }
  std::vector<std::span<double>> grad_blocks;
  std::size_t off = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    grad_blocks.emplace_back(grad.data() + off, critic_.block_size(i));
    off += critic_.block_size(i);
  }
  nn::clip_grad_norm(grad_blocks, max_grad_norm_);
  auto params = critic_.param_blocks();
  for (std::size_t i = 0; i < 3; ++i) adams_[i].step(params[i], grad_blocks[i]);
  return loss;
}

DecentralValue::DecentralValue(std::vector<nn::DecentralCritic> critics,
                               nn::AdamOptions opt, double max_grad_norm)
    : critics_(std::move(critics)), max_grad_norm_(max_grad_norm) {
  for (const auto& c : critics_) adams_.emplace_back(c.param_count(), opt);
}

double DecentralValue::value(const RolloutBatch& b, int k, int n) const {
  return critics_[n].value(b.obs_at(k, n));
}

double DecentralValue::next_value(const RolloutBatch& b, int k, int n) const {
  return critics_[n].value(b.next_obs_at(k, n));
}

double DecentralValue::fit_step(const RolloutBatch& b,
                                std::span<const Sample> samples,
                                std::span<const double> targets) {
  std::vector<std::vector<double>> grads(critics_.size());
  std::vector<int> counts(critics_.size(), 0);
  for (const auto& s : samples) ++counts[s.agent];
  nn::MlpNet::Cache cache;
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [k, n] = samples[i];
    auto& g = grads[n];
    if (g.empty()) g.assign(critics_[n].param_count(), 0.0);
    const double v = critics_[n].value(b.obs_at(k, n), cache);
    const double err = v - targets[i];
    loss += err * err * scale;
    // per-network mean so each critic sees a full-strength gradient
    critics_[n].backward(cache, 2.0 * err / counts[n], g);
  }
  for (std::size_t n = 0; n < critics_.size(); ++n) {
    if (grads[n].empty()) continue;
    std::span<double> blocks[1] = {grads[n]};
    nn::clip_grad_norm(blocks, max_grad_norm_);
    adams_[n].step(critics_[n].net().params(), grads[n]);
  }
  return loss;
}

std::size_t DecentralValue::param_count() const {
  std::size_t n = 0;
  for (const auto& c : critics_) n += c.param_count();
  return n;
}

std::vector<double> evaluate_values(const ValueEstimator& critic,
                                    const RolloutBatch& b) {
  std::vector<double> v(static_cast<std::size_t>(b.n_steps) * b.n_agents);
  for (int k = 0; k < b.n_steps; ++k) {
    for (int n = 0; n < b.n_agents; ++n) {
      v[static_cast<std::size_t>(k) * b.n_agents + n] = critic.value(b, k, n);
    }
  }
  return v;
}

AdvantageTargets compute_targets(const ValueEstimator& critic,
                                 const RolloutBatch& b,
                                 std::span<const double> values, double gamma,
                                 double reward_scale, bool bootstrap_time_limit) {
  AdvantageTargets out;
  const std::size_t rows = static_cast<std::size_t>(b.n_steps) * b.n_agents;
  out.advantages.resize(rows);
  out.targets.resize(rows);
  out.next_values.resize(rows);
  for (int k = 0; k < b.n_steps; ++k) {
    const bool episode_end = b.done[k] != 0;
    const bool batch_end = k + 1 == b.n_steps;
    for (int n = 0; n < b.n_agents; ++n) {
      const std::size_t row = static_cast<std::size_t>(k) * b.n_agents + n;
      double v_next = 0.0;
      bool terminal = episode_end;
      if (episode_end) {
        if (bootstrap_time_limit) {
          v_next = critic.next_value(b, k, n);
          terminal = false;
        }
      } else if (batch_end) {
        // truncated mid-episode: bootstrap from the successor
        v_next = critic.next_value(b, k, n);
      } else {
        v_next = values[row + b.n_agents];
      }
      const double r = b.rewards[row] / reward_scale;
      out.next_values[row] = terminal ? 0.0 : v_next;
      out.targets[row] = r + (terminal ? 0.0 : gamma * v_next);
      out.advantages[row] = advantage(r, v_next, values[row], gamma, terminal);
    }
  }
  return out;
}

std::vector<double> critic_update(ValueEstimator& critic, const RolloutBatch& b,
                                  std::span<const double> targets, int steps,
                                  int minibatch_size, Rng& rng) {
  std::vector<Sample> pool;
  pool.reserve(static_cast<std::size_t>(b.n_steps) * b.n_agents);
  for (int k = 0; k < b.n_steps; ++k) {
    for (int n = 0; n < b.n_agents; ++n) pool.push_back({k, n});
  }
  std::vector<double> losses;
  if (pool.empty()) return losses;
  const std::size_t mb = std::min<std::size_t>(minibatch_size, pool.size());
  std::size_t cursor = pool.size();
  std::vector<double> mb_targets(mb);
  for (int s = 0; s < steps; ++s) {
    if (cursor + mb > pool.size()) {
      std::shuffle(pool.begin(), pool.end(), rng);
      cursor = 0;
    }
    std::span<const Sample> batch(pool.data() + cursor, mb);
    for (std::size_t i = 0; i < mb; ++i) {
      mb_targets[i] =
          targets[static_cast<std::size_t>(batch[i].step) * b.n_agents +
                  batch[i].agent];
    }
    cursor += mb;
    const double loss = critic.fit_step(b, batch, mb_targets);
    if (!std::isfinite(loss)) {
      throw DivergenceError("critic loss is not finite at step " +
                            std::to_string(s));
    }
    losses.push_back(loss);
  }
  return losses;
}

// --- actors ----------------------------------------------------------------

PolicyOptimizer::PolicyOptimizer(const nn::GaussianPolicy& p, double lr)
    : net(p.mean_net().param_count(), {.lr = lr}),
      log_std(p.log_std().size(), {.lr = lr}) {}

double ppo_surrogate(const nn::GaussianPolicy& policy, const RolloutBatch& b,
                     std::span<const Sample> samples,
                     std::span<const double> advantages,
                     std::span<const double> old_log_probs, double clip_eps,
                     double entropy_coeff, std::span<double> net_grad,
                     std::span<double> log_std_grad, double* max_ratio_dev) {
  const bool want_grad = !net_grad.empty();
  const double scale = 1.0 / static_cast<double>(samples.size());
  const double entropy = policy.entropy();
  double total = 0.0;
  double dev = 0.0;
  nn::MlpNet::Cache cache;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [k, n] = samples[i];
    const auto obs = b.obs_at(k, n);
    const auto raw = b.raw_action_at(k, n);
    const auto mask = b.mask_at(k, n);
    const double logp = policy.log_prob(obs, raw, cache, mask);
    const double ratio = std::exp(logp - old_log_probs[i]);
    dev = std::max(dev, std::fabs(ratio - 1.0));
    total += ppo_objective(ratio, advantages[i], clip_eps, 0.0, 0.0);
    if (want_grad) {
      // d(objective)/d(logp) = d/d(rho) * rho
      const double g =
          ppo_objective_ratio_grad(ratio, advantages[i], clip_eps) * ratio;
      if (g != 0.0) {
        policy.backward_log_prob(cache, raw, g * scale, net_grad, log_std_grad,
                                 mask);
      }
    }
  }
  if (want_grad) {
    for (double& g : log_std_grad) g += entropy_coeff;
  }
  if (max_ratio_dev) *max_ratio_dev = dev;
  return total * scale + entropy_coeff * entropy;
}

double pg_surrogate(const nn::GaussianPolicy& policy, const RolloutBatch& b,
                    std::span<const Sample> samples,
                    std::span<const double> advantages, double entropy_coeff,
                    std::span<double> net_grad,
                    std::span<double> log_std_grad) {
  const bool want_grad = !net_grad.empty();
  const double scale = 1.0 / static_cast<double>(samples.size());
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [k, n] = samples[i];
    const auto obs = b.obs_at(k, n);
    const auto raw = b.raw_action_at(k, n);
    if (want_grad) {
      total += advantages[i] * policy.accumulate_log_prob_grad(
                                   obs, raw, advantages[i] * scale, net_grad,
                                   log_std_grad, b.mask_at(k, n));
    } else {
      total += advantages[i] * policy.log_prob(obs, raw, b.mask_at(k, n));
    }
  }
  if (want_grad) {
    for (double& g : log_std_grad) g += entropy_coeff;
  }
  return total * scale + entropy_coeff * policy.entropy();
}

namespace {

// Gradient ascent through Adam (which minimizes): negate, clip, step.
void ascend(nn::GaussianPolicy& policy, PolicyOptimizer& opt,
            std::vector<double>& net_grad, std::vector<double>& log_std_grad,
            double max_grad_norm) {
  for (double& g : net_grad) g = -g;
  for (double& g : log_std_grad) g = -g;
  std::span<double> blocks[2] = {net_grad, log_std_grad};
  nn::clip_grad_norm(blocks, max_grad_norm);
  opt.net.step(policy.mean_net().params(), net_grad);
  opt.log_std.step(policy.log_std(), log_std_grad);
  if (!policy.all_finite()) {
    throw DivergenceError("policy parameters became non-finite");
  }
}

}  // namespace

ActorUpdateStats ppo_actor_update(nn::GaussianPolicy& policy,
                                  PolicyOptimizer& opt, const RolloutBatch& b,
                                  std::span<const Sample> samples,
                                  std::span<const double> advantages,
                                  const TrainConfig& cfg, Rng& rng) {
  ActorUpdateStats stats;
  if (samples.empty()) return stats;
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t mb =
      std::min<std::size_t>(cfg.minibatch_size, samples.size());
  std::vector<Sample> mb_samples;
  std::vector<double> mb_adv, mb_old;
  std::vector<double> net_grad(policy.mean_net().param_count());
  std::vector<double> log_std_grad(policy.n_actions());
  for (int epoch = 0; epoch < cfg.epochs_per_iter; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start + mb <= order.size(); start += mb) {
      mb_samples.clear();
      mb_adv.clear();
      mb_old.clear();
      for (std::size_t i = start; i < start + mb; ++i) {
        const Sample s = samples[order[i]];
        mb_samples.push_back(s);
        mb_adv.push_back(advantages[order[i]]);
        mb_old.push_back(b.log_prob(s.step, s.agent));
      }
      std::fill(net_grad.begin(), net_grad.end(), 0.0);
      std::fill(log_std_grad.begin(), log_std_grad.end(), 0.0);
      double dev = 0.0;
      const double obj =
          ppo_surrogate(policy, b, mb_samples, mb_adv, mb_old, cfg.clip_eps,
                        cfg.entropy_coeff, net_grad, log_std_grad, &dev);
      if (!std::isfinite(obj)) {
        throw DivergenceError("PPO objective is not finite");
      }
      if (stats.minibatches == 0) stats.first_max_ratio_dev = dev;
      stats.mean_objective = obj;
      ++stats.minibatches;
      ascend(policy, opt, net_grad, log_std_grad, cfg.max_grad_norm);
    }
  }
  return stats;
}

ActorUpdateStats a2c_actor_update(nn::GaussianPolicy& policy,
                                  PolicyOptimizer& opt, const RolloutBatch& b,
                                  std::span<const Sample> samples,
                                  std::span<const double> advantages,
                                  const TrainConfig& cfg) {
  ActorUpdateStats stats;
  if (samples.empty()) return stats;
  // Each transition is used exactly once, in rollout order.
  const std::size_t mb =
      std::min<std::size_t>(cfg.minibatch_size, samples.size());
  std::vector<double> net_grad(policy.mean_net().param_count());
  std::vector<double> log_std_grad(policy.n_actions());
  for (std::size_t start = 0; start < samples.size(); start += mb) {
    const std::size_t len = std::min(mb, samples.size() - start);
    std::fill(net_grad.begin(), net_grad.end(), 0.0);
    std::fill(log_std_grad.begin(), log_std_grad.end(), 0.0);
    const double obj = pg_surrogate(policy, b, samples.subspan(start, len),
                                    advantages.subspan(start, len),
                                    cfg.entropy_coeff, net_grad, log_std_grad);
    if (!std::isfinite(obj)) {
      throw DivergenceError("A2C objective is not finite");
    }
    stats.mean_objective = obj;
    ++stats.minibatches;
    ascend(policy, opt, net_grad, log_std_grad, cfg.max_grad_norm);
  }
  return stats;
}

}  // namespace gridflux::algos

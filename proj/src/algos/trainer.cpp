#include "gridflux/trainer.hpp"

#include <string>

#include "gridflux/errors.hpp"

namespace gridflux {
namespace {

EnvConfig finalized(EnvConfig c) {
  c.finalize();
  return c;
}

}  // namespace

Trainer::Trainer(EnvConfig env, TrainConfig train, std::uint64_t seed)
    : env_config_(finalized(std::move(env))),
      env_(env_config_),
      cfg_(std::move(train)),
      seed_(seed),
      policy_rng_(make_stream(seed, 0, 0, StreamPurpose::kPolicy)),
      update_rng_(make_stream(seed, 0, 0, StreamPurpose::kShuffle)),
      start_(std::chrono::steady_clock::now()) {
  const int n = env_.n_agents();
  cfg_.validate(n);
  groups_ = cfg_.policy_groups;
  if (groups_.empty()) {
    for (int i = 0; i < n; ++i) groups_.push_back(i);
  }
  const int n_groups = *std::max_element(groups_.begin(), groups_.end()) + 1;
  const int obs_dim = static_cast<int>(env_.obs_dim());
  const double t = env_config_.step_hours;
  for (int g = 0; g < n_groups; ++g) {
    Rng init = make_stream(seed, 1000 + g, 0, StreamPurpose::kInit);
    policies_.emplace_back(obs_dim, env_.n_appliances(), t, cfg_.actor_hidden,
                           init);
    optimizers_.emplace_back(policies_.back(), cfg_.actor_lr);
  }
  const nn::AdamOptions copt{.lr = cfg_.critic_lr};
  Rng critic_init = make_stream(seed, 2000, 0, StreamPurpose::kInit);
  nn::CentralCritic central(n, static_cast<int>(env_.state_dim()),
                            kCriticExtraDim, cfg_.critic_hidden, critic_init);
  if (cfg_.critic_mode == CriticMode::kCentral) {
    critic_ = std::make_unique<algos::CentralValue>(std::move(central), copt,
                                                    cfg_.max_grad_norm);
  } else {
    const int hidden = nn::DecentralCritic::matched_hidden(
        obs_dim, central.param_count(), n);
    std::vector<nn::DecentralCritic> critics;
    for (int i = 0; i < n; ++i) {
      Rng init = make_stream(seed, 3000 + i, 0, StreamPurpose::kInit);
      critics.emplace_back(obs_dim, hidden, init);
    }
    critic_ = std::make_unique<algos::DecentralValue>(std::move(critics), copt,
                                                      cfg_.max_grad_norm);
  }
}

std::uint64_t training_batch_seed(std::uint64_t seed, int iteration) {
  return splitmix64(seed ^ (0xa5a5a5a5ULL + static_cast<std::uint64_t>(iteration - 1)));
}

IterationResult Trainer::run_iteration() {
  const int n = env_.n_agents();
  std::vector<PolicyActor> actors;
  actors.reserve(n);
  for (int i = 0; i < n; ++i) actors.emplace_back(policies_[groups_[i]]);
  std::vector<Actor*> actor_ptrs;
  for (auto& a : actors) actor_ptrs.push_back(&a);

  const std::uint64_t batch_seed = training_batch_seed(seed_, iteration_ + 1);
  RolloutBatch batch =
      rollout(env_, actor_ptrs, cfg_.rollout_steps, batch_seed, policy_rng_);
  batch.iteration = iteration_ + 1;
  batch.seed = seed_;
  if (cfg_.mask_inert_actions) {
    // policies are unchanged since the rollout, so this is the behaviour
    // log-probability restricted to the effective components
    batch.masked = true;
    for (int k = 0; k < batch.n_steps; ++k) {
      for (int i = 0; i < n; ++i) {
        batch.log_probs[static_cast<std::size_t>(k) * n + i] =
            policies_[groups_[i]].log_prob(batch.obs_at(k, i),
                                           batch.raw_action_at(k, i),
                                           batch.mask_at(k, i));
      }
    }
  }

  IterationResult result;
  try {
    const auto values = algos::evaluate_values(*critic_, batch);
    const auto at = algos::compute_targets(*critic_, batch, values, cfg_.gamma,
                                           cfg_.reward_scale,
                                           cfg_.bootstrap_time_limit);
    result.critic_losses =
        algos::critic_update(*critic_, batch, at.targets, cfg_.critic_grad_steps,
                             cfg_.minibatch_size, update_rng_);

    // per-agent normalization, then pooling by policy group
    std::vector<std::vector<algos::Sample>> samples(policies_.size());
    std::vector<std::vector<double>> advs(policies_.size());
    std::vector<double> agent_adv;
    std::vector<int> agent_steps;
    for (int i = 0; i < n; ++i) {
      agent_adv.clear();
      agent_steps.clear();
      for (int k = 0; k < batch.n_steps; ++k) {
        // steps where no component counts carry no policy gradient
        if (batch.masked && !batch.any_effective(k, i)) continue;
        agent_steps.push_back(k);
        agent_adv.push_back(at.advantages[static_cast<std::size_t>(k) * n + i]);
      }
      if (cfg_.normalize_advantages) algos::normalize(agent_adv);
      const int g = groups_[i];
      for (std::size_t j = 0; j < agent_steps.size(); ++j) {
        samples[g].push_back({agent_steps[j], i});
        advs[g].push_back(agent_adv[j]);
      }
    }
    for (std::size_t g = 0; g < policies_.size(); ++g) {
      algos::ActorUpdateStats stats;
      if (cfg_.algo == Algo::kPpo) {
        stats = algos::ppo_actor_update(policies_[g], optimizers_[g], batch,
                                        samples[g], advs[g], cfg_, update_rng_);
      } else {
        stats = algos::a2c_actor_update(policies_[g], optimizers_[g], batch,
                                        samples[g], advs[g], cfg_);
      }
      result.first_max_ratio_dev =
          std::max(result.first_max_ratio_dev, stats.first_max_ratio_dev);
    }
  } catch (const DivergenceError& e) {
    throw DivergenceError("iteration " + std::to_string(iteration_ + 1) +
                          ": " + e.what());
  }

  ++iteration_;
  result.batch = compute_metrics(batch);
  result.batch.metrics.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
          .count();
  return result;
}

std::vector<IterationResult> Trainer::train(int iterations,
                                            const Callback& cb) {
  std::vector<IterationResult> out;
  for (int i = 0; i < iterations; ++i) {
    out.push_back(run_iteration());
    if (cb) cb(out.back());
  }
  return out;
}

nn::Checkpoint Trainer::checkpoint() const {
  nn::Checkpoint ck;
  for (std::size_t g = 0; g < policies_.size(); ++g) {
    const std::string p = "policy" + std::to_string(g);
    ck.nets.emplace(p + "/mean", policies_[g].mean_net());
    ck.vectors.emplace(p + "/log_std", policies_[g].log_std());
  }
  if (auto* c = dynamic_cast<const algos::CentralValue*>(critic_.get())) {
    ck.nets.emplace("critic/own", c->critic().own_branch());
    ck.nets.emplace("critic/others", c->critic().others_branch());
    ck.nets.emplace("critic/merge", c->critic().merge_net());
  } else if (auto* d =
                 dynamic_cast<const algos::DecentralValue*>(critic_.get())) {
    for (std::size_t i = 0; i < d->critics().size(); ++i) {
      ck.nets.emplace("critic" + std::to_string(i), d->critics()[i].net());
    }
  }
  ck.vectors.emplace("meta/iteration",
                     std::vector<double>{static_cast<double>(iteration_)});
  std::vector<double> groups(groups_.begin(), groups_.end());
  ck.vectors.emplace("meta/policy_groups", groups);
  return ck;
}

void Trainer::restore(const nn::Checkpoint& ck) {
  auto copy_net = [&](const std::string& name, nn::MlpNet& dst) {
    auto it = ck.nets.find(name);
    if (it == ck.nets.end()) throw SchemaError("checkpoint lacks " + name);
    if (it->second.layer_dims() != dst.layer_dims()) {
      throw SchemaError("checkpoint shape mismatch for " + name);
    }
    std::copy(it->second.params().begin(), it->second.params().end(),
              dst.params().begin());
  };
  for (std::size_t g = 0; g < policies_.size(); ++g) {
    const std::string p = "policy" + std::to_string(g);
    copy_net(p + "/mean", policies_[g].mean_net());
    auto it = ck.vectors.find(p + "/log_std");
    if (it == ck.vectors.end() ||
        it->second.size() != policies_[g].log_std().size()) {
      throw SchemaError("checkpoint lacks a matching " + p + "/log_std");
    }
    policies_[g].log_std() = it->second;
  }
  if (auto* c = dynamic_cast<algos::CentralValue*>(critic_.get())) {
    copy_net("critic/own", c->critic().own_branch());
    copy_net("critic/others", c->critic().others_branch());
    copy_net("critic/merge", c->critic().merge_net());
  } else if (auto* d = dynamic_cast<algos::DecentralValue*>(critic_.get())) {
    for (std::size_t i = 0; i < d->critics().size(); ++i) {
      copy_net("critic" + std::to_string(i), d->critics()[i].net());
    }
  }
  if (auto it = ck.vectors.find("meta/iteration");
      it != ck.vectors.end() && !it->second.empty()) {
    iteration_ = static_cast<int>(it->second.front());
  }
}

}  // namespace gridflux

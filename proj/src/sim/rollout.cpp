#include "gridflux/rollout.hpp"

#include <stdexcept>

namespace gridflux {
namespace {

void append_observations(const GridEnv& env, const StepResult& r,
                         std::vector<double>& obs_out,
                         std::vector<double>& extras_out) {
  const std::size_t d = env.obs_dim();
  const double t = env.config().step_hours;
  for (const auto& o : r.observations) {
    const std::size_t at = obs_out.size();
    obs_out.resize(at + d);
    o.encode(t, env.config().queue_cap, std::span<double>(obs_out).subspan(at, d));
    extras_out.push_back(o.time_of_day);
    extras_out.push_back(o.prev_price / t);
  }
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t batch_seed, int episode) {
  return splitmix64(batch_seed * 0x100000001b3ULL + episode + 1);
}

int RolloutBatch::n_episodes() const {
  int e = 0;
  for (auto d : done) e += d;
  return e;
}

RolloutBatch rollout(GridEnv& env, std::span<Actor* const> actors, int steps,
                     std::uint64_t seed, Rng& policy_rng) {
  const int n = env.n_agents();
  if (actors.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("rollout: need one actor per household");
  }
  RolloutBatch b;
  b.n_agents = n;
  b.n_steps = steps;
  b.obs_dim = static_cast<int>(env.obs_dim());
  b.state_dim = static_cast<int>(env.state_dim());
  b.n_actions = env.n_appliances();
  b.intervals_per_day = env.config().intervals_per_day;
  b.seed = seed;
  const std::size_t ns = static_cast<std::size_t>(steps) * n;
  b.obs.reserve(ns * b.obs_dim);
  b.next_obs.reserve(ns * b.obs_dim);
  b.actions.resize(ns * b.n_actions);
  b.raw_actions.resize(ns * b.n_actions);
  b.log_probs.resize(ns);
  b.rewards.reserve(ns);
  b.joint_state.reserve(ns * b.state_dim);
  b.next_joint_state.reserve(ns * b.state_dim);
  b.done.reserve(steps);
  b.action_mask.reserve(ns * b.n_actions);

  int episode = 0;
  StepResult current = env.reset(episode_seed(seed, episode));
  std::vector<double> cur_obs, cur_extras;
  append_observations(env, current, cur_obs, cur_extras);
  std::vector<double> joint(static_cast<std::size_t>(n) * b.n_actions);

  for (int k = 0; k < steps; ++k) {
    b.obs.insert(b.obs.end(), cur_obs.begin(), cur_obs.end());
    b.extras.insert(b.extras.end(), cur_extras.begin(), cur_extras.end());
    b.joint_state.insert(b.joint_state.end(), current.joint_state.begin(),
                         current.joint_state.end());
    for (int i = 0; i < n; ++i) {
      const std::size_t row = static_cast<std::size_t>(k) * n + i;
      auto action = std::span<double>(b.actions).subspan(row * b.n_actions,
                                                         b.n_actions);
      auto raw = std::span<double>(b.raw_actions).subspan(row * b.n_actions,
                                                          b.n_actions);
      b.log_probs[row] = actors[i]->act(
          std::span<const double>(cur_obs).subspan(
              static_cast<std::size_t>(i) * b.obs_dim, b.obs_dim),
          policy_rng, action, raw);
      std::copy(action.begin(), action.end(), joint.begin() + i * b.n_actions);
    }

    StepResult next = env.step(joint);
    b.rewards.insert(b.rewards.end(), next.rewards.begin(), next.rewards.end());
    b.done.push_back(next.done ? 1 : 0);
    b.action_mask.insert(b.action_mask.end(), next.info.started.begin(),
                         next.info.started.end());
    b.energy.insert(b.energy.end(), next.info.energy.begin(),
                    next.info.energy.end());
    b.cost.insert(b.cost.end(), next.info.cost.begin(), next.info.cost.end());
    b.arrived.insert(b.arrived.end(), next.info.arrived.begin(),
                     next.info.arrived.end());
    b.completed.insert(b.completed.end(), next.info.completed.begin(),
                       next.info.completed.end());
    b.grid_price.push_back(next.info.grid_price);
    b.aggregate.push_back(next.info.aggregate_energy);
    b.interval.push_back(static_cast<int>(next.info.interval));

    cur_obs.clear();
    cur_extras.clear();
    append_observations(env, next, cur_obs, cur_extras);
    b.next_obs.insert(b.next_obs.end(), cur_obs.begin(), cur_obs.end());
    b.next_extras.insert(b.next_extras.end(), cur_extras.begin(),
                         cur_extras.end());
    b.next_joint_state.insert(b.next_joint_state.end(),
                              next.joint_state.begin(), next.joint_state.end());
    if (next.done && k + 1 < steps) {
      ++episode;
      next = env.reset(episode_seed(seed, episode));
      cur_obs.clear();
      cur_extras.clear();
      append_observations(env, next, cur_obs, cur_extras);
    }
    current = std::move(next);
  }
  return b;
}

}  // namespace gridflux

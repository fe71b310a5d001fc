#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridflux/env.hpp"
#include "gridflux/rng.hpp"

namespace gridflux {

// Anything that maps an encoded observation to M delays.
class Actor {
 public:
  virtual ~Actor() = default;
  // Writes the clipped action and the raw sample it came from; returns the
  // log-probability of the raw sample under the behaviour policy.
  virtual double act(std::span<const double> obs, Rng& rng,
                     std::span<double> action, std::span<double> raw) = 0;
};

// Critic-side extras appended to a household's state: time of day and the
// household's previous price divided by T.
inline constexpr int kCriticExtraDim = 2;

// Flat, step-major storage of N agents over `steps` environment steps.
struct RolloutBatch {
  int n_agents = 0;
  int n_steps = 0;
  int obs_dim = 0;
  int state_dim = 0;  // per household
  int n_actions = 0;
  int intervals_per_day = 0;
  std::uint64_t seed = 0;
  int iteration = 0;

  std::vector<double> obs;          // [k][n][obs_dim]
  std::vector<double> next_obs;     // [k][n][obs_dim]
  std::vector<double> actions;      // [k][n][M], clipped
  std::vector<double> raw_actions;  // [k][n][M]
  std::vector<double> log_probs;    // [k][n]
  std::vector<double> rewards;      // [k][n]
  std::vector<double> joint_state;  // [k][N*state_dim]
  std::vector<double> next_joint_state;
  std::vector<double> extras;       // [k][n][kCriticExtraDim]
  std::vector<double> next_extras;
  std::vector<std::uint8_t> done;   // [k]
  // [k][n][M]: 1 where the delay scheduled a task. Other components leave
  // the trajectory unchanged whatever their value.
  std::vector<std::uint8_t> action_mask;
  // When set, log-probabilities (stored and recomputed) cover only the
  // components selected by action_mask.
  bool masked = false;

  // step info
  std::vector<double> energy;       // [k][n]
  std::vector<double> cost;         // [k][n]
  std::vector<double> grid_price;   // [k]
  std::vector<double> aggregate;    // [k]
  std::vector<int> arrived;         // [k][n]
  std::vector<int> completed;       // [k][n]
  std::vector<int> interval;        // [k]

  std::span<const double> obs_at(int k, int n) const {
    return {obs.data() + (static_cast<std::size_t>(k) * n_agents + n) * obs_dim,
            static_cast<std::size_t>(obs_dim)};
  }
  std::span<const double> next_obs_at(int k, int n) const {
    return {next_obs.data() +
                (static_cast<std::size_t>(k) * n_agents + n) * obs_dim,
            static_cast<std::size_t>(obs_dim)};
  }
  std::span<const double> raw_action_at(int k, int n) const {
    return {raw_actions.data() +
                (static_cast<std::size_t>(k) * n_agents + n) * n_actions,
            static_cast<std::size_t>(n_actions)};
  }
  std::span<const double> action_at(int k, int n) const {
    return {actions.data() +
                (static_cast<std::size_t>(k) * n_agents + n) * n_actions,
            static_cast<std::size_t>(n_actions)};
  }
  std::span<const double> state_at(int k) const {
    const std::size_t w = static_cast<std::size_t>(n_agents) * state_dim;
    return {joint_state.data() + k * w, w};
  }
  std::span<const double> next_state_at(int k) const {
    const std::size_t w = static_cast<std::size_t>(n_agents) * state_dim;
    return {next_joint_state.data() + k * w, w};
  }
  std::span<const double> extras_at(int k, int n) const {
    return {extras.data() +
                (static_cast<std::size_t>(k) * n_agents + n) * kCriticExtraDim,
            static_cast<std::size_t>(kCriticExtraDim)};
  }
  std::span<const double> next_extras_at(int k, int n) const {
    return {next_extras.data() +
                (static_cast<std::size_t>(k) * n_agents + n) * kCriticExtraDim,
            static_cast<std::size_t>(kCriticExtraDim)};
  }
  std::span<const std::uint8_t> mask_at(int k, int n) const {
    if (!masked) return {};
    return {action_mask.data() +
                (static_cast<std::size_t>(k) * n_agents + n) * n_actions,
            static_cast<std::size_t>(n_actions)};
  }
  bool any_effective(int k, int n) const {
    const auto at = (static_cast<std::size_t>(k) * n_agents + n) * n_actions;
    for (int j = 0; j < n_actions; ++j) {
      if (action_mask[at + j]) return true;
    }
    return false;
  }
  double reward(int k, int n) const {
    return rewards[static_cast<std::size_t>(k) * n_agents + n];
  }
  double log_prob(int k, int n) const {
    return log_probs[static_cast<std::size_t>(k) * n_agents + n];
  }
  int n_episodes() const;
};

// Collects `steps` joint steps with one actor per household, resetting the
// environment at 00:00 before the first step and at every episode boundary.
// Episode e is seeded with episode_seed(seed, e).
RolloutBatch rollout(GridEnv& env, std::span<Actor* const> actors, int steps,
                     std::uint64_t seed, Rng& policy_rng);

std::uint64_t episode_seed(std::uint64_t batch_seed, int episode);

}  // namespace gridflux

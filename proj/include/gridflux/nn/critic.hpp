#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridflux/nn/mlp.hpp"

namespace gridflux::nn {

// Branched value network over the joint state. The queried household's state
// (plus the shared time/price extras) feeds one branch, the remaining
// households in fixed order feed the other; a merge network maps the
// concatenated branch outputs to V_n.
class CentralCritic {
 public:
  struct Cache {
    MlpNet::Cache own;
    MlpNet::Cache others;
    MlpNet::Cache merge;
  };

  CentralCritic() = default;
  CentralCritic(int n_households, int state_dim, int extra_dim, int hidden,
                Rng& init_rng);

  int n_households() const { return n_households_; }
  int state_dim() const { return state_dim_; }
  int extra_dim() const { return extra_dim_; }
  std::size_t input_dim() const {
    return static_cast<std::size_t>(n_households_) * state_dim_ + extra_dim_;
  }
  std::size_t param_count() const;

  // [s_n, extras] and [s_1..s_N without s_n]. Throws std::out_of_range for a
  // bad household index.
  void build_inputs(std::span<const double> joint_state,
                    std::span<const double> extras, int household,
                    std::vector<double>& own, std::vector<double>& others) const;
  // Flat input vector [s_n, s_others..., extras] as seen by the network.
  std::vector<double> input_vector(std::span<const double> joint_state,
                                   std::span<const double> extras,
                                   int household) const;

  double value(std::span<const double> joint_state,
               std::span<const double> extras, int household) const;
  double value(std::span<const double> joint_state,
               std::span<const double> extras, int household,
               Cache& cache) const;

  // Accumulates d_value * dV/dparams into grad (layout of params()).
  void backward(const Cache& cache, double d_value, std::span<double> grad) const;

  // own | others | merge, concatenated.
  std::vector<std::span<double>> param_blocks();
  std::size_t block_size(std::size_t i) const;

  MlpNet& own_branch() { return own_; }
  MlpNet& others_branch() { return others_; }
  MlpNet& merge_net() { return merge_; }
  const MlpNet& own_branch() const { return own_; }
  const MlpNet& others_branch() const { return others_; }
  const MlpNet& merge_net() const { return merge_; }

 private:
  int n_households_ = 0;
  int state_dim_ = 0;
  int extra_dim_ = 0;
  MlpNet own_;
  MlpNet others_;
  MlpNet merge_;
};

// Per-household value network over the local observation, with a hidden
// width chosen so that N copies roughly match a centralized critic.
class DecentralCritic {
 public:
  DecentralCritic() = default;
  DecentralCritic(int obs_dim, int hidden, Rng& init_rng);

  static int matched_hidden(int obs_dim, std::size_t central_params,
                            int n_households);

  double value(std::span<const double> obs) const;
  double value(std::span<const double> obs, MlpNet::Cache& cache) const;
  void backward(const MlpNet::Cache& cache, double d_value,
                std::span<double> grad) const;

  std::size_t param_count() const { return net_.param_count(); }
  MlpNet& net() { return net_; }
  const MlpNet& net() const { return net_; }

 private:
  MlpNet net_;
};

}  // namespace gridflux::nn

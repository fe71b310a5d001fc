#include "gridflux/nn/critic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gridflux::nn {

CentralCritic::CentralCritic(int n_households, int state_dim, int extra_dim,
                             int hidden, Rng& init_rng)
    : n_households_(n_households),
      state_dim_(state_dim),
      extra_dim_(extra_dim),
      own_({state_dim + extra_dim, hidden}, OutputActivation::kTanh),
      others_({std::max(1, (n_households - 1) * state_dim), hidden},
              OutputActivation::kTanh),
      merge_({2 * hidden, hidden, 1}) {
  own_.init(init_rng);
  others_.init(init_rng);
  merge_.init(init_rng);
}

std::size_t CentralCritic::param_count() const {
  return own_.param_count() + others_.param_count() + merge_.param_count();
}

void CentralCritic::build_inputs(std::span<const double> joint_state,
                                 std::span<const double> extras, int household,
                                 std::vector<double>& own,
                                 std::vector<double>& others) const {
  if (household < 0 || household >= n_households_) {
    throw std::out_of_range("CentralCritic: household index " +
                            std::to_string(household) + " out of range");
  }
  const std::size_t sd = state_dim_;
  own.assign(joint_state.begin() + household * sd,
             joint_state.begin() + (household + 1) * sd);
  own.insert(own.end(), extras.begin(), extras.end());
  others.clear();
  for (int j = 0; j < n_households_; ++j) {
    if (j == household) continue;
    others.insert(others.end(), joint_state.begin() + j * sd,
                  joint_state.begin() + (j + 1) * sd);
  }
  // single-household grids feed a constant zero into the others branch
  if (others.empty()) others.assign(1, 0.0);
}

std::vector<double> CentralCritic::input_vector(
    std::span<const double> joint_state, std::span<const double> extras,
    int household) const {
  std::vector<double> own, others;
  build_inputs(joint_state, extras, household, own, others);
  std::vector<double> out(own.begin(), own.begin() + state_dim_);
  if (n_households_ > 1) out.insert(out.end(), others.begin(), others.end());
  out.insert(out.end(), extras.begin(), extras.end());
  return out;
}

double CentralCritic::value(std::span<const double> joint_state,
                            std::span<const double> extras,
                            int household) const {
  Cache cache;
  return value(joint_state, extras, household, cache);
}

double CentralCritic::value(std::span<const double> joint_state,
                            std::span<const double> extras, int household,
                            Cache& cache) const {
  std::vector<double> own, others;
  build_inputs(joint_state, extras, household, own, others);
  own_.forward(own, cache.own);
  others_.forward(others, cache.others);
  std::vector<double> merged(cache.own.activations.back());
  const auto& o = cache.others.activations.back();
  merged.insert(merged.end(), o.begin(), o.end());
  merge_.forward(merged, cache.merge);
  return cache.merge.activations.back()[0];
}

void CentralCritic::backward(const Cache& cache, double d_value,
                             std::span<double> grad) const {
  const std::size_t n_own = own_.param_count();
  const std::size_t n_others = others_.param_count();
  auto g_own = grad.subspan(0, n_own);
  auto g_others = grad.subspan(n_own, n_others);
  auto g_merge = grad.subspan(n_own + n_others, merge_.param_count());
  const double dv[1] = {d_value};
  std::vector<double> d_merged(merge_.in_dim());
  merge_.backward(cache.merge, dv, g_merge, d_merged);
  const std::size_t h = own_.out_dim();
  own_.backward(cache.own, std::span<const double>(d_merged).subspan(0, h),
                g_own);
  others_.backward(cache.others, std::span<const double>(d_merged).subspan(h),
                   g_others);
}

std::vector<std::span<double>> CentralCritic::param_blocks() {
  return {own_.params(), others_.params(), merge_.params()};
}

std::size_t CentralCritic::block_size(std::size_t i) const {
  return i == 0 ? own_.param_count()
                : i == 1 ? others_.param_count() : merge_.param_count();
}

DecentralCritic::DecentralCritic(int obs_dim, int hidden, Rng& init_rng)
    : net_({obs_dim, hidden, hidden, 1}) {
  net_.init(init_rng);
}

int DecentralCritic::matched_hidden(int obs_dim, std::size_t central_params,
                                    int n_households) {
  // params(h) = h^2 + (obs_dim + 3) h + 1 for an obs -> h -> h -> 1 net
  const double target = static_cast<double>(central_params) / n_households;
  const double b = obs_dim + 3.0;
  const double h = (-b + std::sqrt(b * b + 4.0 * (target - 1.0))) / 2.0;
  return std::max(4, static_cast<int>(std::lround(h)));
}

double DecentralCritic::value(std::span<const double> obs) const {
  MlpNet::Cache cache;
  return value(obs, cache);
}

double DecentralCritic::value(std::span<const double> obs,
                              MlpNet::Cache& cache) const {
  net_.forward(obs, cache);
  return cache.activations.back()[0];
}

void DecentralCritic::backward(const MlpNet::Cache& cache, double d_value,
                               std::span<double> grad) const {
  const double dv[1] = {d_value};
  net_.backward(cache, dv, grad);
}

}  // namespace gridflux::nn

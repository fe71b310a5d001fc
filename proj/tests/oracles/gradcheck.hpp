#pragma once

// Analytic-vs-central-difference gradient audit over randomly drawn networks
// with the shapes the actor and both critics use.

#include <algorithm>
#include <random>
#include <vector>

#include "grid_oracles.hpp"
#include "gridflux/nn/critic.hpp"
#include "gridflux/nn/mlp.hpp"
#include "gridflux/nn/policy.hpp"

namespace gridflux::oracle {

struct GradcheckReport {
  int nets = 0;
  long checked = 0;
  double max_rel_err = 0.0;
};

namespace detail {

inline std::vector<double> uniform(std::size_t n, Rng& rng, double lo = -1.0,
                                   double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Up to `limit` distinct indices into [0, n).
inline std::vector<std::size_t> pick(std::size_t n, std::size_t limit, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(n, limit));
  return idx;
}

}  // namespace detail

inline GradcheckReport run_gradcheck(int n_nets, std::uint64_t seed,
                                     double eps = 1e-3,
                                     std::size_t params_per_net = 200) {
  Rng rng(seed);
  GradcheckReport rep;
  auto note = [&](double analytic, double numeric) {
    rep.max_rel_err = std::max(rep.max_rel_err, relative_error(analytic, numeric));
    ++rep.checked;
  };
  const int obs_dims[] = {20, 21, 22};
  for (int t = 0; t < n_nets; ++t) {
    const int kind = t % 4;
    const int obs = obs_dims[t % 3];
    if (kind == 0) {
      // bare MLP, linear or tanh output, loss = c . f(x)
      const int hidden = 8 + static_cast<int>(rng() % 57);
      const bool tanh_out = rng() % 2;
      nn::MlpNet net({obs, hidden, hidden, 1 + static_cast<int>(rng() % 5)},
                     tanh_out ? nn::OutputActivation::kTanh
                              : nn::OutputActivation::kLinear);
      net.init(rng, 1.0);
      auto x = detail::uniform(obs, rng);
      const auto c = detail::uniform(net.out_dim(), rng);
      auto loss = [&] {
        std::vector<double> y(net.out_dim());
        net.forward(x, y);
        double s = 0.0;
        for (int i = 0; i < net.out_dim(); ++i) s += c[i] * y[i];
        return s;
      };
      nn::MlpNet::Cache cache;
      net.forward(x, cache);
      std::vector<double> g(net.param_count(), 0.0), gx(obs, 0.0);
      net.backward(cache, c, g, gx);
      for (auto i : detail::pick(g.size(), params_per_net, rng)) {
        note(g[i], central_difference4(loss, net.params()[i], eps));
      }
      for (int i = 0; i < obs; ++i) note(gx[i], central_difference4(loss, x[i], eps));
    } else if (kind == 1) {
      // policy log-density, through the squashed mean and log-std
      const double T = 0.5;
      nn::GaussianPolicy pol(obs, 5, T, 64, rng);
      // larger final weights than the 0.01 init so the squash is exercised
      for (auto& w : pol.mean_net().params()) w *= 3.0;
      for (auto& s : pol.log_std()) s += detail::uniform(1, rng, -0.5, 0.5)[0];
      const auto x = detail::uniform(obs, rng);
      const auto raw = detail::uniform(5, rng, -0.1, T + 0.1);
      auto logp = [&] { return pol.log_prob(x, raw); };
      std::vector<double> g(pol.mean_net().param_count(), 0.0), gs(5, 0.0);
      pol.accumulate_log_prob_grad(x, raw, 1.0, g, gs);
      for (auto i : detail::pick(g.size(), params_per_net, rng)) {
        note(g[i], central_difference4(logp, pol.mean_net().params()[i], eps));
      }
      for (int j = 0; j < 5; ++j) {
        note(gs[j], central_difference4(logp, pol.log_std()[j], eps));
      }
    } else if (kind == 2) {
      // centralized critic: all three blocks
      const int n = 2 + static_cast<int>(rng() % 7);
      nn::CentralCritic critic(n, 20, 2, 64, rng);
      const auto joint = detail::uniform(static_cast<std::size_t>(n) * 20, rng, 0.0, 2.0);
      const auto extras = detail::uniform(2, rng, 0.0, 3.0);
      const int who = static_cast<int>(rng() % n);
      auto v = [&] { return critic.value(joint, extras, who); };
      nn::CentralCritic::Cache cache;
      critic.value(joint, extras, who, cache);
      std::vector<double> g(critic.param_count(), 0.0);
      critic.backward(cache, 1.0, g);
      auto blocks = critic.param_blocks();
      std::size_t offset = 0;
      for (auto& block : blocks) {
        for (auto i : detail::pick(block.size(), params_per_net / 3, rng)) {
          note(g[offset + i], central_difference4(v, block[i], eps));
        }
        offset += block.size();
      }
    } else {
      // decentralized critic at its matched width
      const int n = 2 + static_cast<int>(rng() % 7);
      nn::CentralCritic ref(n, 20, 2, 64, rng);
      const int h = nn::DecentralCritic::matched_hidden(obs, ref.param_count(), n);
      nn::DecentralCritic critic(obs, h, rng);
      const auto x = detail::uniform(obs, rng);
      auto v = [&] { return critic.value(x); };
      nn::MlpNet::Cache cache;
      critic.value(x, cache);
      std::vector<double> g(critic.param_count(), 0.0);
      critic.backward(cache, 1.0, g);
      for (auto i : detail::pick(g.size(), params_per_net, rng)) {
        note(g[i], central_difference4(v, critic.net().params()[i], eps));
      }
    }
    ++rep.nets;
  }
  return rep;
}

}  // namespace gridflux::oracle

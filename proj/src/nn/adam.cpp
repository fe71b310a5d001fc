#include "gridflux/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "gridflux/kernels.hpp"

namespace gridflux::nn {

Adam::Adam(std::size_t n_params, AdamOptions options)
    : options_(options), m_(n_params, 0.0), v_(n_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("Adam::step: shape mismatch");
  }
  ++t_;
  const kernels::AdamCoeffs c{
      options_.lr,
      options_.beta1,
      options_.beta2,
      options_.eps,
      1.0 - std::pow(options_.beta1, static_cast<double>(t_)),
      1.0 - std::pow(options_.beta2, static_cast<double>(t_)),
  };
  kernels::active().adam(params.data(), grads.data(), m_.data(), v_.data(),
                         params.size(), c);
}

double l2_norm(std::span<const double> v) {
  return std::sqrt(kernels::dot(v, v));
}

double clip_grad_norm(std::span<const std::span<double>> blocks,
                      double max_norm) {
  double sq = 0.0;
  for (auto b : blocks) sq += kernels::dot(b, b);
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto b : blocks) {
      for (double& g : b) g *= s;
    }
  }
  return norm;
}

}  // namespace gridflux::nn

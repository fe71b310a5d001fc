#include "gridflux/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gridflux/kernels.hpp"

namespace gridflux::nn {

MlpNet::MlpNet(std::vector<int> layer_dims, OutputActivation output)
    : dims_(std::move(layer_dims)), output_(output) {
  if (dims_.size() < 2) throw std::invalid_argument("MlpNet needs >= 2 widths");
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("MlpNet widths must be >= 1");
  }
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(dims_[l] + 1) * dims_[l + 1];
  }
  params_.assign(offset, 0.0);
}

std::size_t MlpNet::param_count_for(std::span<const int> layer_dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    n += static_cast<std::size_t>(layer_dims[l] + 1) * layer_dims[l + 1];
  }
  return n;
}

void MlpNet::init(Rng& rng, double final_scale) {
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    std::uniform_real_distribution<double> u(-bound, bound);
    const double scale = l + 1 == n_layers() ? final_scale : 1.0;
    const std::size_t nw = static_cast<std::size_t>(dims_[l]) * dims_[l + 1];
    for (std::size_t i = 0; i < nw; ++i) {
      params_[weight_offset(l) + i] = scale * u(rng);
    }
    for (int i = 0; i < dims_[l + 1]; ++i) params_[bias_offset(l) + i] = 0.0;
  }
}

void MlpNet::forward(std::span<const double> input, Cache& cache) const {
  if (input.size() != static_cast<std::size_t>(in_dim())) {
    throw std::invalid_argument("MlpNet::forward: expected input of size " +
                                std::to_string(in_dim()) + ", got " +
                                std::to_string(input.size()));
  }
  const auto& k = kernels::active();
  cache.activations.resize(dims_.size());
  cache.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < n_layers(); ++l) {
    auto& out = cache.activations[l + 1];
    out.resize(dims_[l + 1]);
    k.gemv(params_.data() + weight_offset(l), cache.activations[l].data(),
           params_.data() + bias_offset(l), out.data(), dims_[l + 1], dims_[l]);
    if (squashes(l)) {
      for (double& v : out) v = std::tanh(v);
    }
  }
}

void MlpNet::forward(std::span<const double> input,
                     std::span<double> output) const {
  Cache cache;
  forward(input, cache);
  if (output.size() != cache.activations.back().size()) {
    throw std::invalid_argument("MlpNet::forward: output size mismatch");
  }
  std::copy(cache.activations.back().begin(), cache.activations.back().end(),
            output.begin());
}

void MlpNet::backward(const Cache& cache, std::span<const double> output_grad,
                      std::span<double> param_grad,
                      std::span<double> input_grad) const {
  const auto& k = kernels::active();
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> prev;
  for (std::size_t l = n_layers(); l-- > 0;) {
    const auto& out = cache.activations[l + 1];
    if (squashes(l)) {
      for (std::size_t i = 0; i < delta.size(); ++i) {
        delta[i] *= 1.0 - out[i] * out[i];
      }
    }
    const auto& in = cache.activations[l];
    k.outer_acc(delta.data(), in.data(), param_grad.data() + weight_offset(l),
                dims_[l + 1], dims_[l]);
    double* gb = param_grad.data() + bias_offset(l);
    for (int i = 0; i < dims_[l + 1]; ++i) gb[i] += delta[i];
    if (l == 0 && input_grad.empty()) break;
    prev.assign(dims_[l], 0.0);
    k.gemv_t_acc(params_.data() + weight_offset(l), delta.data(), prev.data(),
                 dims_[l + 1], dims_[l]);
    delta.swap(prev);
  }
  if (!input_grad.empty()) {
    std::copy(delta.begin(), delta.end(), input_grad.begin());
  }
}

bool MlpNet::all_finite() const {
  for (double p : params_) {
    if (!std::isfinite(p)) return false;
  }
  return true;
}

}  // namespace gridflux::nn

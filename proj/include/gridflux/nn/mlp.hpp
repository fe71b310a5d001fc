#pragma once

// Feedforward network with tanh hidden layers and analytic reverse-mode
// gradients. Parameters live in one flat buffer, layer by layer: W (out x in,
// row-major) followed by b (out).

#include <cstddef>
#include <span>
#include <vector>

#include "gridflux/rng.hpp"

namespace gridflux::nn {

enum class OutputActivation { kLinear, kTanh };

class MlpNet {
 public:
  struct Cache {
    // activations[0] is the input, activations[l + 1] the output of layer l
    std::vector<std::vector<double>> activations;
  };

  MlpNet() = default;
  explicit MlpNet(std::vector<int> layer_dims,
                  OutputActivation output = OutputActivation::kLinear);

  static std::size_t param_count_for(std::span<const int> layer_dims);

  const std::vector<int>& layer_dims() const { return dims_; }
  int in_dim() const { return dims_.front(); }
  int out_dim() const { return dims_.back(); }
  std::size_t n_layers() const { return dims_.size() - 1; }
  OutputActivation output_activation() const { return output_; }
  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases; the last
  // layer's weights are multiplied by final_scale.
  void init(Rng& rng, double final_scale = 1.0);

  // Throws std::invalid_argument on dimension mismatch.
  void forward(std::span<const double> input, std::span<double> output) const;
  void forward(std::span<const double> input, Cache& cache) const;

  // Accumulates d(loss)/d(params) into param_grad given d(loss)/d(output)
  // at the cached forward pass; writes d(loss)/d(input) when input_grad is
  // non-empty.
  void backward(const Cache& cache, std::span<const double> output_grad,
                std::span<double> param_grad,
                std::span<double> input_grad = {}) const;

  bool all_finite() const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] +
           static_cast<std::size_t>(dims_[layer]) * dims_[layer + 1];
  }
  bool squashes(std::size_t layer) const {
    return layer + 1 < n_layers() || output_ == OutputActivation::kTanh;
  }

  std::vector<int> dims_;
  OutputActivation output_ = OutputActivation::kLinear;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace gridflux::nn

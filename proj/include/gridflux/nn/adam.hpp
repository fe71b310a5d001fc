#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gridflux::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over one flat parameter block.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n_params, AdamOptions options);

  void step(std::span<double> params, std::span<const double> grads);
  long steps_taken() const { return t_; }
  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }

 private:
  AdamOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

double l2_norm(std::span<const double> v);

// Scales every block in place so that their joint L2 norm is at most
// max_norm; returns the norm before scaling.
double clip_grad_norm(std::span<const std::span<double>> blocks,
                      double max_norm);

}  // namespace gridflux::nn

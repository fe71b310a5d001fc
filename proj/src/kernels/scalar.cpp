#include <cmath>

#include "gridflux/kernels.hpp"

namespace gridflux::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, const double* x, const double* bias, double* y,
          std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + dot(w + r * cols, x, cols);
  }
}

void gemv_t_acc(const double* w, const double* g, double* x_grad,
                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(g[r], w + r * cols, x_grad, cols);
}

void outer_acc(const double* g, const double* x, double* w_grad,
               std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(g[r], x, w_grad + r * cols, cols);
}

void adam(double* p, const double* g, double* m, double* v, std::size_t n,
          const AdamCoeffs& c) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

const KernelTable kTable{dot, axpy, gemv, gemv_t_acc, outer_acc, adam};

}  // namespace

const KernelTable& table() { return kTable; }

}  // namespace gridflux::kernels::scalar

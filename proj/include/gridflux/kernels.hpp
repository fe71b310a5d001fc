#pragma once

// Dense double-precision kernels behind the MLP forward/backward passes and
// the Adam update. Each kernel has a scalar reference implementation and an
// AVX2+FMA variant; the active table is selected once at startup from CPUID
// (override with GRIDFLUX_SIMD=scalar|avx2).

#include <cstddef>
#include <span>
#include <string_view>

namespace gridflux::kernels {

enum class Isa { kScalar, kAvx2 };

struct AdamCoeffs {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x + bias, W row-major rows x cols
  void (*gemv)(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols);
  // x_grad += W^T g
  void (*gemv_t_acc)(const double* w, const double* g, double* x_grad,
                     std::size_t rows, std::size_t cols);
  // w_grad += g x^T
  void (*outer_acc)(const double* g, const double* x, double* w_grad,
                    std::size_t rows, std::size_t cols);
  // in-place Adam moment update and parameter step
  void (*adam)(double* params, const double* grads, double* m, double* v,
               std::size_t n, const AdamCoeffs& c);
};

namespace scalar {
const KernelTable& table();
}

namespace avx2 {
// Only valid to call when cpu_supports_avx2() is true.
const KernelTable& table();
}

bool cpu_supports_avx2();

const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

// Force a specific table (tests, benchmarking). Falls back to scalar if the
// CPU lacks the requested extension; returns the ISA actually selected.
Isa select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace gridflux::kernels

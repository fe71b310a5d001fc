#include <cstdlib>
#include <string>

#include "gridflux/kernels.hpp"

namespace gridflux::kernels {
namespace {

struct Active {
  const KernelTable* table;
  Isa isa;
};

Active detect() {
  if (const char* env = std::getenv("GRIDFLUX_SIMD")) {
    if (std::string(env) == "scalar") return {&scalar::table(), Isa::kScalar};
  }
  if (cpu_supports_avx2()) return {&avx2::table(), Isa::kAvx2};
  return {&scalar::table(), Isa::kScalar};
}

Active& current() {
  static Active a = detect();
  return a;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(GRIDFLUX_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if !defined(GRIDFLUX_HAVE_AVX2)
namespace avx2 {
const KernelTable& table() { return scalar::table(); }
}  // namespace avx2
#endif

const KernelTable& active() { return *current().table; }

Isa active_isa() { return current().isa; }

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

Isa select(Isa isa) {
  if (isa == Isa::kAvx2 && cpu_supports_avx2()) {
    current() = {&avx2::table(), Isa::kAvx2};
  } else {
    current() = {&scalar::table(), Isa::kScalar};
  }
  return current().isa;
}

}  // namespace gridflux::kernels

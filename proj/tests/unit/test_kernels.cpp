#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gridflux/kernels.hpp"

namespace k = gridflux::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b,
                 double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::fabs(a[i] - b[i]) <= tol * (1.0 + std::fabs(a[i])));
  }
}

}  // namespace

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!k::cpu_supports_avx2()) {
    MESSAGE("CPU lacks AVX2+FMA; only the scalar table is exercised");
    return;
  }
  const auto& s = k::scalar::table();
  const auto& v = k::avx2::table();
  std::mt19937_64 rng(7);
  // odd sizes hit the tail loops
  for (std::size_t rows : {1, 3, 5, 16, 64, 67}) {
    for (std::size_t cols : {1, 2, 7, 8, 22, 64, 141}) {
      const auto w = random_vec(rows * cols, rng);
      const auto x = random_vec(cols, rng);
      const auto bias = random_vec(rows, rng);
      const auto g = random_vec(rows, rng);

      std::vector<double> ys(rows), yv(rows);
      s.gemv(w.data(), x.data(), bias.data(), ys.data(), rows, cols);
      v.gemv(w.data(), x.data(), bias.data(), yv.data(), rows, cols);
      check_close(ys, yv, 1e-12);

      std::vector<double> xs(cols, 0.5), xv(cols, 0.5);
      s.gemv_t_acc(w.data(), g.data(), xs.data(), rows, cols);
      v.gemv_t_acc(w.data(), g.data(), xv.data(), rows, cols);
      check_close(xs, xv, 1e-12);

      std::vector<double> ws(rows * cols, 1.0), wv(rows * cols, 1.0);
      s.outer_acc(g.data(), x.data(), ws.data(), rows, cols);
      v.outer_acc(g.data(), x.data(), wv.data(), rows, cols);
      check_close(ws, wv, 1e-12);
    }
  }
  for (std::size_t n : {0, 1, 3, 4, 9, 1000, 1001}) {
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    CHECK(std::fabs(s.dot(a.data(), b.data(), n) -
                    v.dot(a.data(), b.data(), n)) <= 1e-10);
    std::vector<double> ys = b, yv = b;
    s.axpy(0.3, a.data(), ys.data(), n);
    v.axpy(0.3, a.data(), yv.data(), n);
    check_close(ys, yv, 1e-14);

    const k::AdamCoeffs c{1e-3, 0.9, 0.999, 1e-8, 0.1, 0.001};
    std::vector<double> ps = a, pv = a, ms(n, 0.1), mv(n, 0.1), vs(n, 0.2),
                        vv(n, 0.2);
    s.adam(ps.data(), b.data(), ms.data(), vs.data(), n, c);
    v.adam(pv.data(), b.data(), mv.data(), vv.data(), n, c);
    check_close(ps, pv, 1e-14);
    check_close(ms, mv, 1e-14);
    check_close(vs, vv, 1e-14);
  }
}

TEST_CASE("scalar kernels match hand values") {
  const auto& s = k::scalar::table();
  const double w[] = {1, 2, 3, 4, 5, 6};  // 2 x 3
  const double x[] = {1, 0, -1};
  const double b[] = {0.5, -0.5};
  double y[2];
  s.gemv(w, x, b, y, 2, 3);
  CHECK(y[0] == doctest::Approx(-1.5));
  CHECK(y[1] == doctest::Approx(-2.5));
  const double g[] = {1, 2};
  double xg[3] = {0, 0, 0};
  s.gemv_t_acc(w, g, xg, 2, 3);
  CHECK(xg[0] == 9);
  CHECK(xg[1] == 12);
  CHECK(xg[2] == 15);
}

TEST_CASE("kernel table selection honours requests") {
  const auto before = k::active_isa();
  CHECK(k::select(k::Isa::kScalar) == k::Isa::kScalar);
  CHECK(k::active_isa() == k::Isa::kScalar);
  const auto got = k::select(k::Isa::kAvx2);
  CHECK(got == (k::cpu_supports_avx2() ? k::Isa::kAvx2 : k::Isa::kScalar));
  k::select(before);
  CHECK(k::isa_name(k::Isa::kScalar) == "scalar");
}

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "torusmf/kernels.hpp"

using namespace torusmf;

namespace {

std::vector<double> randv(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("active table is one of the two variants") {
  const auto& a = kernels::active();
  const bool known = &a == &kernels::scalar() || (kernels::avx2() && &a == kernels::avx2());
  CHECK(known);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const kernels::Table* v = kernels::avx2();
  if (!v) {
    MESSAGE("AVX2 variant unavailable on this machine; skipping");
    return;
  }
  const auto& s = kernels::scalar();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 31u, 64u, 1000u, 4099u}) {
    CAPTURE(n);
    const auto a = randv(n, 1 + n), b = randv(n, 2 + n), w = randv(n, 3 + n, 0.0, 2.0);
    const double scale = static_cast<double>(n) + 1.0;
    CHECK(std::abs(s.dot(a.data(), b.data(), n) - v->dot(a.data(), b.data(), n)) <= 1e-14 * scale);
    CHECK(std::abs(s.dot3(a.data(), b.data(), w.data(), n) - v->dot3(a.data(), b.data(), w.data(), n)) <= 1e-14 * scale);

    auto y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

    std::vector<double> m1(n), m2(n);
    s.mul(a.data(), b.data(), m1.data(), n);
    v->mul(a.data(), b.data(), m2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(m1[i] == m2[i]);

    const auto u = randv(n, 4 + n, -30.0, 30.0);
    std::vector<double> e1(n), e2(n);
    const double t1 = s.exp_weighted(u.data(), w.data(), e1.data(), n);
    const double t2 = v->exp_weighted(u.data(), w.data(), e2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e1[i] - e2[i]) <= 1e-14 * e1[i]);
    CHECK(std::abs(t1 - t2) <= 1e-13 * std::abs(t1) + 1e-300);

    std::vector<std::complex<double>> c1(n), c2(n);
    for (std::size_t i = 0; i < n; ++i) c1[i] = c2[i] = {a[i], b[i]};
    s.scale_complex(w.data(), c1.data(), n);
    v->scale_complex(w.data(), c2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(c1[i] == c2[i]);

    if (n > 0) {
      CHECK(s.max_abs(a.data(), n) == v->max_abs(a.data(), n));
      CHECK(s.max_value(a.data(), n) == v->max_value(a.data(), n));
    }
  }
}

TEST_CASE("scalar reductions are reproducible") {
  const auto a = randv(1001, 9), b = randv(1001, 10);
  const auto& s = kernels::scalar();
  CHECK(s.dot(a.data(), b.data(), a.size()) == s.dot(a.data(), b.data(), a.size()));
}

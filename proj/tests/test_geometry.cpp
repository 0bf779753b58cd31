#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

#include "support.hpp"
#include "torusmf/errors.hpp"
#include "torusmf/grid.hpp"

using namespace torusmf;
using support::pi;

TEST_CASE("build_grid basics") {
  const auto g = build_grid(64, "zero");
  CHECK(g.n() == 64);
  CHECK(g.h() == doctest::Approx(1.0 / 64));
  CHECK(g.total_area() == doctest::Approx(1.0).epsilon(1e-14));

  const double c = 0.3;
  const auto gc = build_grid(64, ScalarField(64, c));
  CHECK(gc.total_area() == doctest::Approx(std::exp(2 * c)).epsilon(1e-13));

  CHECK_THROWS_AS(build_grid(48, "zero"), InvalidArgument);
  CHECK_THROWS_AS(build_grid(8, "zero"), InvalidArgument);
  CHECK_THROWS_AS(build_grid(64, "bogus"), InvalidArgument);
  std::vector<double> bad(64 * 64, 0.0);
  bad[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScalarField(64, bad), InvalidArgument);
}

TEST_CASE("conformal area against Gauss-Legendre quadrature") {
  const auto g = build_grid(128, "cos-x");
  auto f = [](double x) { return std::exp(0.2 * std::cos(2 * pi * x)); };
  double oracle = 0.0;
  const int panels = 16;
  for (int p = 0; p < panels; ++p) {
    oracle += boost::math::quadrature::gauss<double, 20>::integrate(f, double(p) / panels, double(p + 1) / panels);
  }
  CHECK(std::abs(g.total_area() - oracle) <= 1e-10);
}

TEST_CASE("integrate") {
  const auto g = build_grid(64, "zero");
  CHECK(integrate(ScalarField(64, 1.0), g) == doctest::Approx(1.0).epsilon(1e-15));
  ScalarField s(64);
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t i = 0; i < 64; ++i) s(i, j) = std::pow(std::sin(2 * pi * i / 64.0), 2);
  CHECK(std::abs(integrate(s, g) - 0.5) <= 1e-12);

  // band-limited f with v != 0 against a 4x refined grid
  const auto t = support::Trig::random(5);
  const auto gv = build_grid(64, "cos-x");
  const auto fine = build_grid(256, "cos-x");
  CHECK(std::abs(integrate(t.sample(64), gv) - integrate(t.sample(256), fine)) <= 1e-10);

  CHECK_THROWS_AS(integrate(ScalarField(32), g), InvalidArgument);
}

TEST_CASE("exterior derivative") {
  const auto c = exterior_derivative(ScalarField(32, 2.5));
  CHECK(support::max_abs(c.c1) <= 1e-13);
  CHECK(support::max_abs(c.c2) <= 1e-13);

  ScalarField s(64), expect(64);
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t i = 0; i < 64; ++i) {
      s(i, j) = std::sin(2 * pi * i / 64.0);
      expect(i, j) = 2 * pi * std::cos(2 * pi * i / 64.0);
    }
  const auto d = exterior_derivative(s);
  CHECK(support::max_diff(d.c1, expect) <= 1e-12);
  CHECK(support::max_abs(d.c2) <= 1e-12);

  // fourth-order centred differences converge to the spectral derivative at O(h^4)
  const auto t = support::Trig::random(3);
  auto fd_error = [&](std::size_t n) {
    const auto u = t.sample(n);
    const auto du = exterior_derivative(u);
    const double h = 1.0 / n;
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const long li = static_cast<long>(i), lj = static_cast<long>(j);
        const double fd = (-u.at(li + 2, lj) + 8 * u.at(li + 1, lj) - 8 * u.at(li - 1, lj) + u.at(li - 2, lj)) / (12 * h);
        err = std::max(err, std::abs(fd - du.c1(i, j)));
        CHECK(std::abs(du.c1(i, j) - t.dx(i * h, j * h)) <= 1e-10);
      }
    return err;
  };
  const double e1 = fd_error(64), e2 = fd_error(128);
  CHECK(e1 / e2 > 13.0);
  CHECK(e1 / e2 < 19.0);
}

TEST_CASE("codifferential and Laplacian") {
  const auto g = build_grid(64, "cos-x");
  CHECK(support::max_abs(codifferential(OneForm(64), g)) == 0.0);

  const auto u = support::Trig::random(11).sample(64);
  const auto lap = laplacian(u, g);
  CHECK(support::max_diff(codifferential(exterior_derivative(u), g), lap) <= 1e-12 * support::max_abs(lap));

  const auto flat = build_grid(64, "zero");
  CHECK(support::max_abs(codifferential(OneForm(ScalarField(64, 1.3), ScalarField(64)), flat)) <= 1e-13);

  ScalarField s(64);
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t i = 0; i < 64; ++i) s(i, j) = std::sin(2 * pi * i / 64.0);
  auto expect = s;
  expect *= 4 * pi * pi;
  CHECK(support::max_diff(laplacian(s, flat), expect) <= 1e-11);
  CHECK(support::max_abs(laplacian(ScalarField(64, 4.0), g)) <= 1e-12);

  // v != 0: -e^{-2v} times the flat Laplacian
  const auto fl = flat_laplacian(u);
  auto direct = hadamard(g.inverse_conformal(), fl);
  CHECK(support::max_diff(lap, direct) <= 1e-12 * support::max_abs(lap));
}

TEST_CASE("adjointness, divergence theorem, shift equivariance") {
  const auto g = build_grid(64, "cos-x");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto u = support::Trig::random(seed).sample(64);
    const auto w = support::Trig::random(seed + 100).sample(64);
    const double lhs = l2_inner(laplacian(u, g), w, g);
    const double rhs = oneform_inner(exterior_derivative(u), exterior_derivative(w), g);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(rhs)));
    CHECK(std::abs(integrate(laplacian(u, g), g)) <= 1e-10);
  }
  const auto flat = build_grid(64, "zero");
  const auto u = support::Trig::random(8).sample(64);
  const auto a = laplacian(shift(u, 1, 0), flat);
  const auto b = shift(laplacian(u, flat), 1, 0);
  CHECK(support::max_diff(a, b) <= 1e-13 * support::max_abs(b));
  const auto da = exterior_derivative(shift(u, 0, 1));
  const auto db = exterior_derivative(u);
  CHECK(support::max_diff(da.c2, shift(db.c2, 0, 1)) <= 1e-11);
}

TEST_CASE("periodic access and distances") {
  ScalarField f(16);
  f(15, 0) = 3.0;
  CHECK(f.at(-1, 16) == 3.0);
  const auto g = build_grid(16, "zero");
  const auto r = distance_to(g, {0, 0});
  CHECK(r(15, 0) == doctest::Approx(1.0 / 16));
  CHECK(r(8, 8) == doctest::Approx(std::sqrt(0.5)));
  CHECK(periodic_offset(0.9, 0.0) == doctest::Approx(-0.1));
}

TEST_CASE("finite-difference Laplacian is the 5-point stencil") {
  const auto u = support::Trig::random(4).sample(32);
  const auto l = flat_laplacian(u, Backend::FiniteDifference);
  const double n2 = 32.0 * 32.0;
  for (long j = 0; j < 32; ++j)
    for (long i = 0; i < 32; ++i) {
      const double st = n2 * (4 * u.at(i, j) - u.at(i + 1, j) - u.at(i - 1, j) - u.at(i, j + 1) - u.at(i, j - 1));
      CHECK(std::abs(st - l(i, j)) <= 1e-9 * n2);
    }
}

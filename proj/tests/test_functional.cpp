#include <doctest.h>

#include <cmath>
#include <string>

#include "support.hpp"
#include "torusmf/errors.hpp"
#include "torusmf/functional.hpp"

using namespace torusmf;
using support::pi;

TEST_CASE("functional at zero") {
  auto s = support::problem(32, "cos-x", "exact:cos-x:0.3", "exp-cos", 4 * pi);
  const double m = integrate(s.hweight, s.grid);
  CHECK(evaluate_j(ScalarField(32), s) == doctest::Approx(-4 * pi * std::log(m)).epsilon(1e-14));
  auto f = support::problem(32, "zero", "zero", "one", 4 * pi);
  CHECK(std::abs(evaluate_j(ScalarField(32), f)) <= 1e-15);
}

TEST_CASE("overflow guard") {
  auto s = support::problem(16, "zero", "zero", "one", 1.0);
  ScalarField u(16);
  u(3, 3) = 701.0;
  CHECK_THROWS_AS(evaluate_j(u, s), OverflowError);
  try {
    evaluate_j(u, s);
  } catch (const OverflowError& e) {
    CHECK(std::string(e.what()).find("exponent overflow") != std::string::npos);
  }
  CHECK_THROWS_AS(el_residual(u, s), OverflowError);
  u(3, 3) = 700.0;
  CHECK_NOTHROW(evaluate_j(u, s));
}

TEST_CASE("classical reduction with omega = 0") {
  for (const char* v : {"zero", "cos-x"}) {
    for (const char* h : {"one", "exp-cos"}) {
      auto s = support::problem(64, v, "zero", h, 6.0);
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto u = smooth_random_field(64, seed, 5, 1.0);
        CHECK(std::abs(evaluate_j(u, s) - classical_j(u, s.grid, s.hweight, s.rho)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("Euler-Lagrange residual") {
  SUBCASE("trivial states") {
    auto s = support::problem(32, "cos-x", "exact:cos-x:0.3", "exp-cos", 0.0);
    const auto r = el_residual(ScalarField(32), s);
    CHECK(support::max_abs(r.raw) == 0.0);
    CHECK(r.lambda1 == 0.0);
    auto f = support::problem(32, "zero", "zero", "one", 5.0);
    const auto r2 = el_residual(ScalarField(32), f);
    CHECK(support::max_abs(r2.raw) <= 1e-13);
  }
  SUBCASE("two routes to lambda1") {
    auto s = support::problem(64, "cos-x", "exact:cos-x:0.3", "exp-cos", 4 * pi);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto u = project_h1(smooth_random_field(64, seed, 4, 1.0), s.kb, s.grid);
      const auto r = el_residual(u, s);
      CHECK(std::abs(r.lambda1 - r.lambda1_projection) <= 1e-10);
      CHECK(std::abs(l2_inner(r.projected, *s.kb.tau1, s.grid)) <= 1e-12);
    }
  }
  SUBCASE("dim 0 leaves the residual unprojected") {
    auto s = support::problem(32, "zero", "harmonic:1,0.5", "one", 4 * pi);
    const auto u = smooth_random_field(32, 3, 4, 1.0);
    const auto r = el_residual(u, s);
    CHECK(support::max_diff(r.raw, r.projected) == 0.0);
    CHECK(r.lambda1 == 0.0);
  }
}

TEST_CASE("gradient matches central differences") {
  auto s = support::problem(64, "cos-x", "exact:cos-x:0.3", "exp-cos", 5.0);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto u = project_h1(smooth_random_field(64, seed, 4, 1.0), s.kb, s.grid);
    const auto phi = project_h1(smooth_random_field(64, seed + 9, 4, 1.0), s.kb, s.grid);
    const double eps = 1e-5;
    auto up = u, um = u;
    up.add_scaled(eps, phi);
    um.add_scaled(-eps, phi);
    const double fd = (evaluate_j(up, s) - evaluate_j(um, s)) / (2 * eps);
    const double an = l2_inner(el_residual(u, s).raw, phi, s.grid);
    CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an));
  }
}

TEST_CASE("minimize: rho = 0") {
  auto s = support::problem(32, "cos-x", "exact:cos-x:0.3", "exp-cos", 0.0);
  const auto res = minimize(s, smooth_random_field(32, 4));
  CHECK(res.converged);
  CHECK(support::max_abs(res.u) == 0.0);
  CHECK(res.residual == 0.0);
}

TEST_CASE("minimize: flat torus, rho = 4 pi") {
  auto s = support::problem(64, "zero", "zero", "one", 4 * pi);
  const auto init = project_h1(smooth_random_field(64, 21, 4, 1.0), s.kb, s.grid);
  const auto res = minimize(s, init);
  REQUIRE(res.converged);
  CHECK(res.residual <= 1e-8);
  const double j0 = evaluate_j(ScalarField(64), s);
  CHECK(res.jvalue <= j0 + 1e-10);
  CHECK(support::max_abs(res.u) <= 1e-6);
  for (std::size_t i = 1; i < res.j_history.size(); ++i) CHECK(res.j_history[i] <= res.j_history[i - 1] + 1e-12);
  // minimality against random perturbations in H1
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto p = project_h1(smooth_random_field(64, 1000 + k, 3, 1e-2), s.kb, s.grid);
    p += res.u;
    CHECK(evaluate_j(p, s) >= res.jvalue - 1e-12);
  }
}

TEST_CASE("minimize: weighted and twisted problems") {
  for (const char* conn : {"zero", "exact:cos-x:0.3", "harmonic:1,0"}) {
    for (const char* v : {"zero", "cos-x"}) {
      CAPTURE(conn);
      CAPTURE(v);
      auto s = support::problem(64, v, conn, "exp-cos", 4 * pi);
      const auto res = minimize(s, ScalarField(64));
      REQUIRE(res.converged);
      CHECK(res.residual <= 1e-8);
      CHECK(res.jvalue < evaluate_j(ScalarField(64), s));
      CHECK(res.mu == doctest::Approx(weighted_exp_integral(res.u, s)).epsilon(1e-14));
      const auto r = el_residual(res.u, s);
      CHECK(std::abs(r.lambda1 - res.lambda1) <= 1e-12);
      CHECK(std::abs(r.lambda1 - r.lambda1_projection) <= 1e-10);
      CHECK(full_el_residual(res.u, s) <= 1e-7);
      if (s.kb.dim == 1) CHECK(std::abs(l2_inner(res.u, *s.kb.tau1, s.grid)) <= 1e-10);
    }
  }
}

TEST_CASE("minimize flags supercritical runs") {
  auto s = support::problem(32, "zero", "zero", "exp-cos", 9 * pi);
  MinimizeOptions o;
  o.max_iter = 20;
  const auto res = minimize(s, ScalarField(32), o);
  CHECK(res.supercritical);
}

TEST_CASE("subcritical functional is bounded below on the unit energy ball") {
  for (double rho : {2 * pi, 4 * pi, 6 * pi}) {
    auto s = support::problem(64, "zero", "exact:cos-x:0.3", "one", rho);
    double lo = 1e300;
    for (std::uint64_t k = 0; k < 400; ++k) {
      auto u = project_h1(smooth_random_field(64, 5000 + k, 1 + static_cast<int>(k % 8), 1.0), s.kb, s.grid);
      const double e = bundle_energy(u, s.conn, s.grid);
      u *= std::sqrt(static_cast<double>(k % 10 + 1) / 10.0 / e);
      lo = std::min(lo, evaluate_j(u, s));
    }
    CAPTURE(rho);
    CHECK(std::isfinite(lo));
    // J >= -rho (E/(16 pi) + log of a bounded Moser-Trudinger constant)
    CHECK(lo >= -rho);
  }
}

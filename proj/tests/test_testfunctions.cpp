#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "torusmf/errors.hpp"
#include "torusmf/testfunctions.hpp"

using namespace torusmf;
using support::pi;

TEST_CASE("bubble mass and energies") {
  CHECK(bubble(0.0) == doctest::Approx(0.0));
  CHECK(bubble(2.0) == doctest::Approx(-2 * std::log(1.5)).epsilon(1e-15));
  const auto rep = bubble_checks();
  CHECK(std::abs(rep.mass - 8 * pi) <= 1e-10);
  REQUIRE(rep.energies.size() == 3);
  for (const auto& e : rep.energies) {
    CAPTURE(e.R);
    CHECK(e.relative_error <= 1e-10);
    // the leading term 32 pi log R - 16 pi log 8 - 16 pi dominates as R grows
    CHECK(std::abs(e.closed_form - e.leading) <= 16 * pi * 8 / (e.R * e.R) + 1e-12);
  }
}

TEST_CASE("annulus capacity") {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {2.0, -1.0}, {0.5, 3.0}}) {
    const double exact = annulus_capacity(a, b, 0.1, 0.4);
    CHECK(std::abs(annulus_capacity_numeric(a, b, 0.1, 0.4) - exact) <= 1e-6 * exact);
  }
  CHECK(annulus_capacity(1, 0, 0.1, 0.4) == doctest::Approx(2 * pi / std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("Moser family") {
  auto s = support::problem(256);
  const Node z{128, 128};
  const auto m = moser_profile(z, 0.125, 16, s.grid);
  CHECK(m(128, 128) == doctest::Approx(-std::sqrt(std::log(16.0) / (4 * pi))).epsilon(1e-12));
  double mn = 0.0;
  for (double x : m.values()) mn = std::min(mn, x);
  CHECK(mn == m(128, 128));
  CHECK(m(0, 0) == 0.0);
  // radial symmetry
  CHECK(m(128 + 5, 128) == doctest::Approx(m(128, 128 + 5)).epsilon(1e-14));
  CHECK_THROWS_AS(moser_profile(z, 0.5, 16, s.grid), InvalidArgument);
  CHECK_THROWS_AS(moser_profile(z, 0.125, 1, s.grid), InvalidArgument);

  const auto f = moser_family(z, 0.125, 16, s);
  CHECK(std::abs(l2_inner(f, *s.kb.tau1, s.grid)) <= 1e-12);
  // energy tends to one as the log annulus is resolved
  CHECK(std::abs(bundle_energy(moser_profile(z, 0.125, 4, s.grid), s.conn, s.grid) - 1.0) <= 0.02);
}

TEST_CASE("probe at alpha = 0 returns the area") {
  auto s = support::problem(128, "cos-x");
  const auto v = tm_probe(0.0, {4, 8}, {64, 64}, 0.125, s);
  for (const auto& p : v) CHECK(p.total == doctest::Approx(s.grid.total_area()).epsilon(1e-12));
  CHECK(log_slope({4, 8, 16}, {1.0, 2.0, 4.0}) == doctest::Approx(1.0 / std::log(2.0) * std::log(2.0)));
}

TEST_CASE("Q_k family") {
  auto s = support::problem(256);
  GreenOptions o;
  o.solvability_tol = 1e-6;
  const Node p{128, 128};
  const GreenData gd = solve_green(p, s, o);
  CHECK_THROWS_AS(build_qk(gd, 4, s), InvalidArgument);
  CHECK_THROWS_AS(build_qk(gd, 4096, s), InvalidArgument);
  double prev = 1e300;
  for (int k : {8, 16}) {
    const auto q = build_qk(gd, k, s);
    CAPTURE(k);
    CHECK(std::abs(l2_inner(q.field, *s.kb.tau1, s.grid)) <= 1e-12);
    CHECK(q.R == doctest::Approx(std::sqrt(k)));
    CHECK(q.unprojected(p.i, p.j) == doctest::Approx(q.c));
    CHECK(std::abs(q.projection_shift) < prev);
    prev = std::abs(q.projection_shift);
    const auto a = qk_audit(q, s);
    const double t = k / 8.0;
    CHECK(std::abs(a.cap_energy - 16 * pi * (std::log1p(t) - t / (1 + t))) <= 0.02 * a.cap_energy);
    CHECK(std::isfinite(a.jvalue));
  }
}

TEST_CASE("Richardson limit recovers a synthetic model") {
  const std::vector<int> ks{8, 16, 32, 64, 128};
  std::vector<double> vals;
  for (int k : ks) vals.push_back(3.25 + 2.0 / k - 5.0 * std::log(k) / k);
  CHECK(richardson_limit(ks, vals) == doctest::Approx(3.25).epsilon(1e-12));
  CHECK_THROWS_AS(richardson_limit({8, 16}, {1.0, 2.0}), InvalidArgument);
}

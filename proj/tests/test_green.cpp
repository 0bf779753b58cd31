#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "torusmf/errors.hpp"
#include "torusmf/green.hpp"

using namespace torusmf;
using support::pi;

namespace {

// h^2 sum over the lattice of g log|x|, with the pole node weighted by log h + C
double lattice_sum(double h, double a) {
  const long m = static_cast<long>(std::ceil(4.0 / h));
  double s = 0.0;
  for (long j = -m; j <= m; ++j)
    for (long i = -m; i <= m; ++i) {
      const double r2 = h * h * static_cast<double>(i * i + j * j);
      const double g = std::exp(-a * r2);
      s += (i == 0 && j == 0) ? g * (std::log(h) + log_lattice_constant()) : g * 0.5 * std::log(r2);
    }
  return s * h * h;
}

}  // namespace

TEST_CASE("lattice log constant") {
  CHECK(log_lattice_constant() == doctest::Approx(-std::log(std::pow(std::tgamma(0.25), 2) / (2 * std::sqrt(pi)))));
  // int e^{-a r^2} log r dA = -(pi / 2a)(gamma + log a); a wrong constant leaves an h^2 error
  const double a = 40.0;
  const double exact = -(pi / (2 * a)) * (0.57721566490153286 + std::log(a));
  const double e1 = std::abs(lattice_sum(1.0 / 32, a) - exact);
  const double e2 = std::abs(lattice_sum(1.0 / 64, a) - exact);
  CHECK(e2 <= 1e-6);
  CHECK(e1 / e2 >= 10.0);
}

TEST_CASE("cutoffs") {
  for (auto kind : {Cutoff::Smooth, Cutoff::Quintic}) {
    CHECK(cutoff(0.05, 0.125, kind).chi == 1.0);
    CHECK(cutoff(0.3, 0.125, kind).chi == 0.0);
    // derivatives against central differences
    for (double r : {0.14, 0.18, 0.22}) {
      const double e = 1e-6;
      const auto c = cutoff(r, 0.125, kind);
      CHECK(std::abs((cutoff(r + e, 0.125, kind).chi - cutoff(r - e, 0.125, kind).chi) / (2 * e) - c.d1) <= 1e-6);
      CHECK(std::abs((cutoff(r + e, 0.125, kind).d1 - cutoff(r - e, 0.125, kind).d1) / (2 * e) - c.d2) <= 1e-4);
    }
  }
}

TEST_CASE("flat square torus: regular part against the eta-function value") {
  auto s = support::problem(512);
  const GreenData gd = solve_green({256, 256}, s);
  const double oracle = support::flat_square_regular_part();
  CHECK(std::abs(gd.A_p - oracle) <= 1e-8);
  CHECK(std::abs(gd.lambda1) <= 1e-8);
  CHECK(std::abs(gd.meanG) <= 1e-8);
  CHECK(std::abs(green_integral(gd, *s.kb.tau1, s.grid)) <= 1e-8);
  CHECK(gd.eta(256, 256) == 0.0);
  const double lambda = critical_value(gd, s);
  CHECK(lambda == doctest::Approx(-8 * pi - 8 * pi * std::log(pi) - 4 * pi * gd.A_p).epsilon(1e-14));

  GreenOptions fd;
  fd.backend = Backend::FiniteDifference;
  const GreenData gf = solve_green({256, 256}, s, fd);
  CHECK(std::abs(gf.A_p - oracle) <= 1e-4);
  CHECK(std::abs(gf.A_p - gd.A_p) <= 0.01 * std::abs(gd.A_p));
}

TEST_CASE("refinement and translation invariance") {
  GreenOptions o;
  o.solvability_tol = 1e-6;
  auto s = support::problem(256);
  const double a1 = solve_green({128, 128}, s, o).A_p;
  const double a2 = solve_green({3, 200}, s, o).A_p;
  CHECK(std::abs(a1 - a2) <= 1e-3);
  auto s512 = support::problem(512);
  const double a3 = solve_green({0, 0}, s512).A_p;
  CHECK(std::abs(a1 - a3) <= 0.01 * std::abs(a3));
}

TEST_CASE("h scaling shifts the critical value by 8 pi log c") {
  auto s = support::problem(128, "zero", "exact:cos-x:0.3", "exp-cos", 0.0);
  GreenOptions o;
  o.solvability_tol = 1e-4;
  const GreenData gd = solve_green({10, 20}, s, o);
  auto s2 = s;
  s2.hweight *= 3.0;
  CHECK(critical_value(gd, s) - critical_value(gd, s2) == doctest::Approx(8 * pi * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("twisted connection on a conformal torus") {
  auto s = support::problem(256, "cos-x", "exact:cos-x:0.3", "exp-cos", 0.0);
  GreenOptions o;
  o.solvability_tol = 1e-6;
  const Node p{40, 100};
  const GreenData gd = solve_green(p, s, o);
  // multiplier against its closed form
  const double direct = 8 * pi * ((*s.kb.tau1)(p.i, p.j) - integrate(*s.kb.tau1, s.grid) / s.grid.total_area());
  CHECK(std::abs(gd.lambda1 - direct) <= 1e-10);
  CHECK(std::abs(green_integral(gd, *s.kb.tau1, s.grid)) <= 1e-8);

  // weak form against smooth test fields
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto phi = support::Trig::random(seed, 2).sample(256);
    const double lhs = green_integral(gd, bundle_laplacian(phi, s.conn, s.grid), s.grid);
    const double rhs = 8 * pi * (phi(p.i, p.j) - integrate(phi, s.grid) / s.grid.total_area()) -
                       gd.lambda1 * l2_inner(*s.kb.tau1, phi, s.grid);
    CHECK(std::abs(lhs - rhs) <= 1e-3 * support::max_abs(phi));
  }

  // local expansion on the annulus 4h..16h
  const RingFit fit = ring_fit(gd, s.grid);
  CHECK(std::abs(fit.constant - gd.A_p) <= 16 * s.grid.h());

  GreenOptions fd = o;
  fd.backend = Backend::FiniteDifference;
  const GreenData gf = solve_green(p, s, fd);
  CHECK(std::abs(gf.A_p - gd.A_p) <= 0.01 * std::abs(gd.A_p));

  // critical values agree across backends once the 5-point error is small
  auto s512 = support::problem(512, "cos-x", "exact:cos-x:0.3", "exp-cos", 0.0);
  const Node p2{80, 200};
  const double l_sp = critical_value(solve_green(p2, s512), s512);
  const double l_fd = critical_value(solve_green(p2, s512, {Backend::FiniteDifference}), s512);
  CHECK(std::abs(l_fd - l_sp) <= 0.01 * std::abs(l_sp));
}

TEST_CASE("ring fit converges under refinement") {
  double prev = 1e300;
  for (std::size_t n : {128u, 256u, 512u}) {
    auto s = support::problem(n, "cos-x", "zero", "one", 0.0);
    GreenOptions o;
    o.solvability_tol = 1e-3;
    const GreenData gd = solve_green({n / 4, n / 2}, s, o);
    const double err = std::abs(ring_fit(gd, s.grid).constant - gd.A_p);
    CAPTURE(n);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("errors") {
  auto s = support::problem(512);
  CHECK_THROWS_AS(solve_green({512, 0}, s), InvalidArgument);
  GreenOptions q;
  q.cutoff = Cutoff::Quintic;
  CHECK_THROWS_AS(solve_green({0, 0}, s, q), SolvabilityError);
  GreenOptions big;
  big.r0 = 0.3;
  CHECK_THROWS_AS(solve_green({0, 0}, s, big), InvalidArgument);
}

TEST_CASE("critical value map") {
  GreenOptions o;
  o.r0 = 0.2;
  o.solvability_tol = 1e-2;
  auto s = support::problem(64);
  const auto m = critical_value_map(s, 16, o, 3);
  CHECK(m.nodes.size() == 16);
  CHECK(m.max - m.min <= 1e-3);
  CHECK_THROWS_AS(critical_value_map(s, 5, o), InvalidArgument);

  auto w = support::problem(64, "zero", "zero", "exp-cos", 0.0);
  const auto mw = critical_value_map(w, 8, o, 4);
  CHECK(mw.argmin.i == 0);
  const auto mw1 = critical_value_map(w, 8, o, 1);
  for (std::size_t k = 0; k < mw.values.size(); ++k) CHECK(mw.values[k] == mw1.values[k]);
}

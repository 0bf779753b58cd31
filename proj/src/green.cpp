#include "torusmf/green.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include <Eigen/Dense>

#include "torusmf/errors.hpp"

namespace torusmf {

namespace {

constexpr double kPi = std::numbers::pi;

void check_node(Node p, const TorusGrid& grid) {
  if (p.i >= grid.n() || p.j >= grid.n()) {
    throw InvalidArgument("pole (" + std::to_string(p.i) + "," + std::to_string(p.j) + ") is not a grid node");
  }
}

double tau1_at(const KernelBasis& kb, Node p) { return kb.dim == 1 ? (*kb.tau1)(p.i, p.j) : 0.0; }

double green_multiplier(Node p, const ProblemSpec& spec) {
  if (spec.kb.dim == 0) return 0.0;
  return 8.0 * kPi * (tau1_at(spec.kb, p) - integrate(*spec.kb.tau1, spec.grid) / spec.grid.total_area());
}

// Sum f e^{2v} h^2 over nodes other than p.
double punctured_integral(const ScalarField& f, Node p, const TorusGrid& grid) {
  return integrate(f, grid) - f(p.i, p.j) * grid.area_element()(p.i, p.j);
}

}  // namespace

double log_lattice_constant() {
  const double g = std::tgamma(0.25);
  return -std::log(g * g / (2.0 * std::sqrt(kPi)));
}

CutoffValue cutoff(double r, double r0, Cutoff kind) {
  if (r <= r0) return {1.0, 0.0, 0.0};
  if (r >= 2.0 * r0) return {0.0, 0.0, 0.0};
  const double t = (r - r0) / r0;
  double s = 0.0, s1 = 0.0, s2 = 0.0;
  if (kind == Cutoff::Quintic) {
    s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    s1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
  } else {
    constexpr double c = 2.0;
    const double a = std::exp(-c / t);
    const double b = std::exp(-c / (1.0 - t));
    s = a / (a + b);
    const double q = c * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
    const double dq = c * (-2.0 / (t * t * t) + 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t)));
    s1 = s * (1.0 - s) * q;
    s2 = s1 * (1.0 - 2.0 * s) * q + s * (1.0 - s) * dq;
  }
  return {1.0 - s, -s1 / r0, -s2 / (r0 * r0)};
}

namespace {

GreenData solve_spectral(Node p, const ProblemSpec& spec, const GreenOptions& opts) {
  const TorusGrid& grid = spec.grid;
  const KernelBasis& kb = spec.kb;
  const std::size_t n = grid.n();
  const double area = grid.total_area();
  const double log_pole = std::log(grid.h()) + log_lattice_constant();
  const ScalarField r = distance_to(grid, p);

  GreenData gd;
  gd.p = p;
  gd.backend = Backend::Spectral;
  gd.lambda1 = green_multiplier(p, spec);

  // Singular part S = -4 chi log r and the smooth right-hand side for
  // w = G - S:  Delta_L w = -8 pi/|S| - lambda1 tau1 - Delta_L S + 8 pi delta_p.
  ScalarField sing(n), rhs(n, -8.0 * kPi / area);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool pole = i == p.i && j == p.j;
      const double rr = r(i, j);
      const double lr = pole ? log_pole : std::log(rr);
      const CutoffValue c = cutoff(rr, opts.r0, opts.cutoff);
      sing(i, j) = -4.0 * c.chi * lr;
      double commutator = 0.0;
      if (!pole && c.d1 != 0.0) commutator = lr * (c.d2 + c.d1 / rr) + 2.0 * c.d1 / rr;
      rhs(i, j) += -4.0 * grid.inverse_conformal()(i, j) * commutator + 4.0 * spec.conn.potential(i, j) * c.chi * lr;
    }
  }
  if (kb.dim == 1) {
    rhs.add_scaled(-gd.lambda1, *kb.tau1);
    gd.solvability_residual = l2_inner(rhs, *kb.tau1, grid);
    if (std::abs(gd.solvability_residual) > opts.solvability_tol) {
      throw SolvabilityError("solve_green: right-hand side has component " + std::to_string(gd.solvability_residual) +
                             " along the kernel");
    }
  }

  const BundleSolver solver(spec.conn, kb, grid, Backend::Spectral);
  ScalarField w = solver.solve(rhs, opts.solve);

  // Fix the kernel component so that G is orthogonal to tau1; the pole term
  // of S enters through the lattice-corrected log.
  if (kb.dim == 1) {
    const double s_tau = l2_inner(sing, *kb.tau1, grid);
    w.add_scaled(-s_tau, *kb.tau1);
  }

  const double vp = grid.v()(p.i, p.j);
  gd.A_p = w(p.i, p.j) + 4.0 * vp;
  gd.pole_quadrature_value = sing(p.i, p.j) + w(p.i, p.j);
  gd.G = sing + w;
  gd.meanG = integrate(gd.G, grid);
  gd.G(p.i, p.j) = gd.A_p;

  gd.eta = ScalarField(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == p.i && j == p.j) continue;
      gd.eta(i, j) = gd.G(i, j) + 4.0 * (std::log(r(i, j)) + vp) - gd.A_p;
    }
  }
  return gd;
}

GreenData solve_finite_difference(Node p, const ProblemSpec& spec, const GreenOptions& opts) {
  const TorusGrid& grid = spec.grid;
  const KernelBasis& kb = spec.kb;
  const std::size_t n = grid.n();
  const double area = grid.total_area();

  GreenData gd;
  gd.p = p;
  gd.backend = Backend::FiniteDifference;
  gd.lambda1 = green_multiplier(p, spec);

  ScalarField rhs(n, -8.0 * kPi / area);
  rhs(p.i, p.j) += 8.0 * kPi / grid.area_element()(p.i, p.j);
  if (kb.dim == 1) {
    rhs.add_scaled(-gd.lambda1, *kb.tau1);
    gd.solvability_residual = l2_inner(rhs, *kb.tau1, grid);
    if (std::abs(gd.solvability_residual) > opts.solvability_tol) {
      throw SolvabilityError("solve_green: right-hand side has component " + std::to_string(gd.solvability_residual) +
                             " along the kernel");
    }
  }
  const BundleSolver solver(spec.conn, kb, grid, Backend::FiniteDifference);
  gd.G = solver.solve(rhs, opts.solve);
  gd.pole_quadrature_value = gd.G(p.i, p.j);
  gd.meanG = integrate(gd.G, grid);

  const RingFit fit = ring_fit(gd, grid);
  gd.A_p = fit.constant;
  gd.G(p.i, p.j) = gd.A_p;

  const ScalarField r = distance_to(grid, p);
  const double vp = grid.v()(p.i, p.j);
  gd.eta = ScalarField(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == p.i && j == p.j) continue;
      gd.eta(i, j) = gd.G(i, j) + 4.0 * (std::log(r(i, j)) + vp) - gd.A_p;
    }
  }
  return gd;
}

}  // namespace

GreenData solve_green(Node p, const ProblemSpec& spec, const GreenOptions& opts) {
  check_node(p, spec.grid);
  if (!(opts.r0 > 0.0 && opts.r0 <= 0.25)) throw InvalidArgument("solve_green: cutoff radius must lie in (0, 1/4]");
  return opts.backend == Backend::Spectral ? solve_spectral(p, spec, opts) : solve_finite_difference(p, spec, opts);
}

double green_integral(const GreenData& gd, const ScalarField& f, const TorusGrid& grid) {
  const ScalarField gf = hadamard(gd.G, f);
  return punctured_integral(gf, gd.p, grid) +
         gd.pole_quadrature_value * f(gd.p.i, gd.p.j) * grid.area_element()(gd.p.i, gd.p.j);
}

RingFit ring_fit(const GreenData& gd, const TorusGrid& grid, double rmin, double rmax) {
  const std::size_t n = grid.n();
  const double h = grid.h();
  const double vp = grid.v()(gd.p.i, gd.p.j);
  const double px = grid.coordinate(gd.p.i), py = grid.coordinate(gd.p.j);
  std::vector<double> ys;
  std::vector<std::array<double, 3>> rows;
  for (std::size_t j = 0; j < n; ++j) {
    const double dy = periodic_offset(grid.coordinate(j), py);
    if (std::abs(dy) > rmax * h) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = periodic_offset(grid.coordinate(i), px);
      const double r = std::hypot(dx, dy);
      if (r < rmin * h || r > rmax * h) continue;
      const double theta = std::atan2(dy, dx);
      rows.push_back({1.0, r * r, h * h * std::cos(4.0 * theta) / (r * r)});
      ys.push_back(gd.G(i, j) + 4.0 * (std::log(r) + vp));
    }
  }
  if (rows.size() < 3) throw InvalidArgument("ring_fit: too few nodes in the annulus");
  Eigen::MatrixXd a(rows.size(), 3);
  Eigen::VectorXd y(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (int c = 0; c < 3; ++c) a(static_cast<Eigen::Index>(k), c) = rows[k][c];
    y(static_cast<Eigen::Index>(k)) = ys[k];
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
  RingFit fit;
  fit.constant = coef(0);
  fit.quadratic = coef(1);
  fit.anisotropic = coef(2);
  fit.rms = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(rows.size()));
  fit.samples = rows.size();
  return fit;
}

double critical_value(const GreenData& gd, const ProblemSpec& spec) {
  const double hp = spec.hweight(gd.p.i, gd.p.j);
  if (!(hp > 0.0)) throw InvalidArgument("critical_value: h must be positive at the pole");
  return -8.0 * kPi - 4.0 * kPi * gd.A_p - 8.0 * kPi * std::log(kPi) - 8.0 * kPi * std::log(hp) +
         4.0 * kPi / spec.grid.total_area() * gd.meanG;
}

CriticalMap critical_value_map(const ProblemSpec& spec, std::size_t stride, const GreenOptions& opts,
                               unsigned threads) {
  const std::size_t n = spec.grid.n();
  if (stride == 0 || n % stride != 0) throw InvalidArgument("critical_value_map: stride must divide n");
  CriticalMap map;
  map.stride = stride;
  for (std::size_t j = 0; j < n; j += stride) {
    for (std::size_t i = 0; i < n; i += stride) map.nodes.push_back({i, j});
  }
  map.values.assign(map.nodes.size(), 0.0);
  std::vector<std::exception_ptr> errors(map.nodes.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, map.nodes.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < map.nodes.size(); k = next++) {
      try {
        map.values[k] = critical_value(solve_green(map.nodes[k], spec, opts), spec);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  map.min = *lo;
  map.max = *hi;
  map.argmin = map.nodes[static_cast<std::size_t>(lo - map.values.begin())];
  map.argmax = map.nodes[static_cast<std::size_t>(hi - map.values.begin())];
  return map;
}

}  // namespace torusmf

#include "torusmf/testfunctions.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "torusmf/errors.hpp"

namespace torusmf {

namespace {

constexpr double kPi = std::numbers::pi;

// 10 t^3 - 15 t^4 + 6 t^5 on [0, 1], clamped.
double quintic_ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// Metric distance to p, using the conformal factor at p.
ScalarField metric_distance(const TorusGrid& grid, Node p) {
  ScalarField r = distance_to(grid, p);
  r *= std::exp(grid.v()(p.i, p.j));
  return r;
}

}  // namespace

double bubble(double r) { return -2.0 * std::log1p(r * r / 8.0); }

BubbleEnergy bubble_energy(double R) {
  if (!(R >= 0.0)) throw InvalidArgument("bubble_energy: radius must be non-negative");
  BubbleEnergy e;
  e.R = R;
  const double s = 1.0 + R * R / 8.0;
  e.closed_form = 16.0 * kPi * (std::log(s) - 1.0 + 1.0 / s);
  e.leading = 16.0 * kPi * std::log(s) - 16.0 * kPi;
  if (R == 0.0) return e;
  // |d phi|^2 = r^2 / (4 (1 + r^2/8)^2)
  auto f = [](double r) {
    const double q = 1.0 + r * r / 8.0;
    return 2.0 * kPi * r * r * r / (4.0 * q * q);
  };
  double err = 0.0;
  e.measured = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, R, 20, 1e-15, &err);
  if (err > 1e-9 * std::max(1.0, std::abs(e.measured))) {
    throw ConvergenceError("bubble_energy: quadrature error estimate " + std::to_string(err));
  }
  e.relative_error = std::abs(e.measured - e.closed_form) / std::abs(e.closed_form);
  return e;
}

BubbleReport bubble_checks(const std::vector<double>& radii) {
  BubbleReport rep;
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [](double r) { return 2.0 * kPi * r * std::exp(bubble(r)); };
  double err = 0.0;
  rep.mass = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14, &err);
  if (err > 1e-10) throw ConvergenceError("bubble_checks: mass quadrature error estimate " + std::to_string(err));
  rep.mass_error = std::abs(rep.mass - 8.0 * kPi);
  for (double R : radii) rep.energies.push_back(bubble_energy(R));
  return rep;
}

ScalarField moser_profile(Node z, double delta, int k, const TorusGrid& grid) {
  if (!(delta > 0.0 && delta <= 0.25)) throw InvalidArgument("moser_profile: delta must lie in (0, 1/4]");
  if (k < 2) throw InvalidArgument("moser_profile: k must be at least 2");
  if (z.i >= grid.n() || z.j >= grid.n()) throw InvalidArgument("moser_profile: centre off the grid");
  const double lk = std::log(static_cast<double>(k));
  const double inner = delta / std::sqrt(static_cast<double>(k));
  const double plateau = -std::sqrt(lk / (4.0 * kPi));
  const double slope = 1.0 / std::sqrt(kPi * lk);
  ScalarField u = metric_distance(grid, z);
  for (double& x : u.values()) {
    if (x <= inner) {
      x = plateau;
    } else if (x < delta) {
      x = slope * std::log(x / delta);
    } else {
      x = 0.0;
    }
  }
  return u;
}

ScalarField moser_family(Node z, double delta, int k, const ProblemSpec& spec) {
  return project_h1(moser_profile(z, delta, k, spec.grid), spec.kb, spec.grid);
}

std::vector<ProbeValue> tm_probe(double alpha, const std::vector<int>& ks, Node z, double delta,
                                 const ProblemSpec& spec) {
  const TorusGrid& grid = spec.grid;
  std::vector<ProbeValue> out;
  for (int k : ks) {
    ProbeValue pv;
    pv.k = k;
    ScalarField u = moser_family(z, delta, k, spec);
    pv.energy = bundle_energy(u, spec.conn, grid);
    if (!(pv.energy > 0.0)) throw InvalidArgument("tm_probe: member has zero energy");
    u *= 1.0 / std::sqrt(pv.energy);
    ScalarField e(grid.n());
    for (std::size_t q = 0; q < u.size(); ++q) {
      const double x = alpha * u[q] * u[q];
      if (x > kExponentLimit) {
        pv.diverged = true;
        break;
      }
      e[q] = std::exp(x);
    }
    if (!pv.diverged) {
      pv.total = integrate(e, grid);
      const double uz = u(z.i, z.j);
      pv.plateau = kPi * delta * delta / k * std::exp(alpha * uz * uz);
    }
    out.push_back(pv);
  }
  return out;
}

double log_slope(const std::vector<int>& ks, const std::vector<double>& values) {
  if (ks.size() != values.size() || ks.size() < 2) throw InvalidArgument("log_slope: need two or more samples");
  const std::size_t m = ks.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(values[i] > 0.0)) throw InvalidArgument("log_slope: values must be positive");
    const double x = std::log(static_cast<double>(ks[i])), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double md = static_cast<double>(m);
  return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

double annulus_capacity(double a, double b, double r_in, double r_out) {
  if (!(r_in > 0.0 && r_out > r_in)) throw InvalidArgument("annulus_capacity: need 0 < r_in < r_out");
  return 2.0 * kPi * (a - b) * (a - b) / std::log(r_out / r_in);
}

double annulus_capacity_numeric(double a, double b, double r_in, double r_out, int nodes) {
  if (!(r_in > 0.0 && r_out > r_in)) throw InvalidArgument("annulus_capacity_numeric: need 0 < r_in < r_out");
  if (nodes < 3) throw InvalidArgument("annulus_capacity_numeric: need at least 3 nodes");
  const int m = nodes - 2;  // interior unknowns
  const double dr = (r_out - r_in) / (nodes - 1);
  auto rmid = [&](int i) { return r_in + (i + 0.5) * dr; };  // between node i and i+1

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int q = 0; q < m; ++q) {
    const int i = q + 1;
    const double wl = rmid(i - 1), wr = rmid(i);
    trip.emplace_back(q, q, wl + wr);
    if (q > 0) trip.emplace_back(q, q - 1, -wl);
    if (q + 1 < m) trip.emplace_back(q, q + 1, -wr);
  }
  rhs(0) += rmid(0) * a;
  rhs(m - 1) += rmid(nodes - 2) * b;
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("annulus_capacity_numeric: factorization failed");
  const Eigen::VectorXd u = ldlt.solve(rhs);

  double energy = 0.0;
  for (int i = 0; i + 1 < nodes; ++i) {
    const double ul = i == 0 ? a : u(i - 1);
    const double ur = i + 1 == nodes - 1 ? b : u(i);
    energy += rmid(i) * (ur - ul) * (ur - ul) / dr;
  }
  return 2.0 * kPi * energy;
}

QkFamily build_qk(const GreenData& gd, int k, const ProblemSpec& spec) {
  const TorusGrid& grid = spec.grid;
  if (k < 8) throw InvalidArgument("build_qk: k must be at least 8");
  if (gd.G.n() != grid.n()) throw InvalidArgument("build_qk: Green data on a different grid");
  QkFamily q;
  q.p = gd.p;
  q.k = k;
  q.R = std::sqrt(static_cast<double>(k));
  const double kd = static_cast<double>(k);
  const double rin = q.R / kd;
  const double vp = grid.v()(gd.p.i, gd.p.j);
  if (rin < 8.0 * grid.h() * std::exp(vp)) {
    throw InvalidArgument("build_qk: grid too coarse, R/k = " + std::to_string(rin) + " is below 8h");
  }
  if (rin >= 0.5) throw InvalidArgument("build_qk: bubble cap does not fit the torus");
  q.c = 2.0 * std::log1p(q.R * q.R / 8.0) - 4.0 * std::log(q.R) + 4.0 * std::log(kd) + gd.A_p;
  q.green = gd;

  const ScalarField r = metric_distance(grid, gd.p);
  q.unprojected = ScalarField(grid.n());
  for (std::size_t s = 0; s < r.size(); ++s) {
    const double x = r[s];
    if (x < rin) {
      q.unprojected[s] = q.c - 2.0 * std::log1p(kd * kd * x * x / 8.0);
    } else if (x < 2.0 * rin) {
      const double rho = 1.0 - quintic_ramp((x - rin) / rin);
      q.unprojected[s] = gd.G[s] - rho * gd.eta[s];
    } else {
      q.unprojected[s] = gd.G[s];
    }
  }
  // The pieces meet at r = R/k: c - 2 log(1 + R^2/8) = A_p - 4 log(R/k).
  q.matching_jump = std::abs(q.c - 2.0 * std::log1p(q.R * q.R / 8.0) - (gd.A_p - 4.0 * std::log(rin)));
  if (spec.kb.dim == 1) {
    q.projection_shift = l2_inner(q.unprojected, *spec.kb.tau1, grid);
    q.field = q.unprojected;
    q.field.add_scaled(-q.projection_shift, *spec.kb.tau1);
  } else {
    q.field = q.unprojected;
  }
  return q;
}

QkAudit qk_audit(const QkFamily& q, const ProblemSpec& spec) {
  const TorusGrid& grid = spec.grid;
  const GreenData& gd = q.green;
  const double kd = static_cast<double>(q.k);
  const double area = grid.total_area();
  QkAudit a;
  a.k = q.k;
  a.energy = bundle_energy(q.field, spec.conn, grid);
  a.energy_closed = 32.0 * kPi * std::log(kd) - 16.0 * kPi * std::log(8.0) - 16.0 * kPi + 8.0 * kPi * gd.A_p -
                    8.0 * kPi / area * gd.meanG;
  a.energy_relative_error = std::abs(a.energy - a.energy_closed) / std::abs(a.energy_closed);

  const OneForm dq = covariant_derivative(q.field, spec.conn);
  const ScalarField dq2 = pointwise_norm2(dq, grid);
  const ScalarField r = metric_distance(grid, q.p);
  const double rin = q.R / kd;
  double cap = 0.0;
  for (std::size_t s = 0; s < r.size(); ++s) {
    if (r[s] < rin) cap += dq2[s] * grid.area_element()[s];
  }
  a.cap_energy = cap;
  a.cap_energy_closed = 16.0 * kPi * std::log1p(q.R * q.R / 8.0) - 16.0 * kPi;

  const double hp = spec.hweight(q.p.i, q.p.j);
  a.log_mass = std::log(weighted_exp_integral(q.field, spec));
  a.log_mass_closed = -std::log(8.0) + std::log(kPi * hp) + 2.0 * std::log(kd) + gd.A_p;
  a.log_mass_error = std::abs(a.log_mass - a.log_mass_closed);

  const ProblemSpec crit = with_rho(spec, 8.0 * kPi);
  a.jvalue = evaluate_j(q.field, crit);
  a.critical = critical_value(gd, spec);
  a.gap = std::abs(a.jvalue - a.critical);
  a.projection_shift = q.projection_shift;
  a.matching_jump = q.matching_jump;
  return a;
}

double richardson_limit(const std::vector<int>& ks, const std::vector<double>& values) {
  if (ks.size() != values.size() || ks.size() < 3) throw InvalidArgument("richardson_limit: need three or more samples");
  const auto m = static_cast<Eigen::Index>(ks.size());
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double k = ks[static_cast<std::size_t>(i)];
    A(i, 0) = 1.0;
    A(i, 1) = 1.0 / k;
    A(i, 2) = std::log(k) / k;
    y(i) = values[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(y);
  return coef(0);
}

}  // namespace torusmf

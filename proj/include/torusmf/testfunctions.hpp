#pragma once

// Explicit families: the Liouville bubble, Moser's truncated logarithms,
// the annulus capacity and the critical test sections Q_k.

#include <vector>

#include "torusmf/functional.hpp"
#include "torusmf/green.hpp"

namespace torusmf {

// phi(y) = -2 log(1 + |y|^2 / 8)
double bubble(double r);

struct BubbleEnergy {
  double R = 0.0;
  double measured = 0.0;
  // 16 pi (log(1 + R^2/8) - 1 + 1/(1 + R^2/8))
  double closed_form = 0.0;
  // 16 pi log(1 + R^2/8) - 16 pi
  double leading = 0.0;
  double relative_error = 0.0;
};

struct BubbleReport {
  double mass = 0.0;  // int_{R^2} e^phi
  double mass_error = 0.0;
  std::vector<BubbleEnergy> energies;
};

// Adaptive radial quadrature; throws ConvergenceError when the quadrature
// error estimate stays above tolerance.
BubbleReport bubble_checks(const std::vector<double>& radii = {4.0, 16.0, 64.0});
BubbleEnergy bubble_energy(double R);

// Truncated logarithm centred at z, before projection:
//   -sqrt(log k / 4 pi)            for r <= delta / sqrt k
//   log(r / delta) / sqrt(pi log k) for delta / sqrt k < r < delta
//   0                              beyond delta
ScalarField moser_profile(Node z, double delta, int k, const TorusGrid& grid);
// The same with its tau1 component removed.
ScalarField moser_family(Node z, double delta, int k, const ProblemSpec& spec);

struct ProbeValue {
  int k = 0;
  double energy = 0.0;  // bundle energy before normalization
  // int e^{alpha u^2} dv_g with u scaled to unit bundle energy
  double total = 0.0;
  // Contribution of the plateau disc B_{delta/sqrt k}: exact disc area times
  // e^{alpha u(z)^2}. This is the term the growth bound speaks about.
  double plateau = 0.0;
  bool diverged = false;
};

std::vector<ProbeValue> tm_probe(double alpha, const std::vector<int>& ks, Node z, double delta,
                                 const ProblemSpec& spec);

// Least-squares slope of log(values) against log(ks).
double log_slope(const std::vector<int>& ks, const std::vector<double>& values);

// 2 pi (a - b)^2 / log(r_out / r_in)
double annulus_capacity(double a, double b, double r_in, double r_out);
// Minimal Dirichlet energy of the radial two-point problem on `nodes`
// uniformly spaced radii (conservative second-order scheme).
double annulus_capacity_numeric(double a, double b, double r_in, double r_out, int nodes = 10000);

struct QkFamily {
  Node p;
  int k = 0;
  double R = 0.0;
  double c = 0.0;
  ScalarField field;      // projected
  ScalarField unprojected;
  double projection_shift = 0.0;  // <q_k, tau1>
  double matching_jump = 0.0;     // largest piece mismatch at r = R/k
  GreenData green;
};

// Needs R/k >= 8h, with R = sqrt(k).
QkFamily build_qk(const GreenData& gd, int k, const ProblemSpec& spec);

struct QkAudit {
  int k = 0;
  double energy = 0.0;
  double energy_closed = 0.0;  // 32 pi log k - 16 pi log 8 - 16 pi + 8 pi A_p - (8 pi/|S|) int G
  double energy_relative_error = 0.0;
  double cap_energy = 0.0;         // int over B_{R/k} of |dq|^2
  double cap_energy_closed = 0.0;  // 16 pi log(1 + R^2/8) - 16 pi
  double log_mass = 0.0;
  double log_mass_closed = 0.0;  // -log 8 + log(pi h(p)) + 2 log k + A_p
  double log_mass_error = 0.0;
  double jvalue = 0.0;  // functional at rho = 8 pi
  double critical = 0.0;
  double gap = 0.0;
  double projection_shift = 0.0;
  double matching_jump = 0.0;
};

QkAudit qk_audit(const QkFamily& q, const ProblemSpec& spec);

// Limit of the sequence from the model L + a/k + b log(k)/k (least squares).
double richardson_limit(const std::vector<int>& ks, const std::vector<double>& values);

}  // namespace torusmf

#pragma once

// Minimization along rho_k = 8 pi - 1/k with warm starts, and the blow-up
// indicators read off the resulting sequence.

#include <numbers>
#include <string>
#include <vector>

#include "torusmf/functional.hpp"

namespace torusmf {

struct SweepRecord {
  int k = 0;
  double rho = 0.0;
  ScalarField u;
  double c = 0.0;  // max u
  Node x;          // node of the max
  double mu = 0.0;
  double lambda1 = 0.0;
  double energy = 0.0;
  double jvalue = 0.0;
  // sqrt(mu / (rho h(x))) e^{-c/2}
  double r_scale = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool overflow = false;
};

// Fills every derived quantity of a record from u at parameter rho.
SweepRecord make_record(int k, double rho, ScalarField u, const ProblemSpec& spec);

inline double sweep_rho(int k) { return 8.0 * std::numbers::pi - 1.0 / k; }

// k = 1..kmax, each step warm-started from the previous minimizer.
std::vector<SweepRecord> subcritical_sweep(const ProblemSpec& tmpl, int kmax, const ScalarField& init,
                                           const MinimizeOptions& opts = {});

// Upper bound on |lambda1| from the quadratures:
// 8 pi max|tau1| (1 + |S|^{1/2}/|S|) max h / min h; zero when dim = 0.
double lambda1_bound(const ProblemSpec& spec);

struct RescaledProfile {
  int k = 0;
  double r_scale = 0.0;
  std::vector<double> ys;   // window coordinates, same for both axes
  std::vector<double> phi;  // u(x + r y) - u(x), row-major with y1 fastest
  std::vector<double> psi;  // u(x + r y) / c
  double phi_distance = 0.0;  // sup over |y| <= window of |phi_k - phi|
  double psi_distance = 0.0;  // sup over |y| <= window of |psi_k - 1|
  double phi_max = 0.0;
};

RescaledProfile rescaled_profile(const SweepRecord& rec, double window = 16.0, int points = 33);

struct DiagnosticsOptions {
  double c_threshold = 50.0;
  // growth of c against log k that counts as unbounded
  double trend_slope = 0.5;
  int trend_tail = 4;
  double gamma = 0.4;
  double epsilon = 0.05;
  double window = 16.0;
  double mu_floor = 1e-6;
};

struct BlowupReport {
  std::string classification;  // "ATTAINED" or "BLOWUP-CANDIDATE"
  std::string reason;
  double c_slope = 0.0;
  double min_mu = 0.0;
  bool mu_above_floor = true;
  double lambda1_max = 0.0;
  double lambda1_bound = 0.0;
  // energy <= 8 pi (1 + eps) c + C0, C0 taken from the first record
  double C0 = 0.0;
  bool energy_height_holds = true;
  bool r_scale_positive = true;
  double j_tail = 0.0;  // largest |J_i - J_j| over the last five records
  double min_r_over_h = 0.0;
  // Filled for BLOWUP-CANDIDATE runs.
  std::vector<double> log_mu_ratio;  // log mu / (c - log mu)
  std::vector<double> c_ratio;       // c / (c - log mu)
  std::vector<double> decay;         // r^2 e^{gamma c}
  double concentration = 0.0;        // int over B_{16 r}(x) of h e^u / mu, last record
  std::vector<double> phi_distance;
  std::vector<double> psi_distance;
  bool phi_distance_nonincreasing = false;
  RescaledProfile last_profile;
};

BlowupReport blowup_diagnostics(const std::vector<SweepRecord>& records, const ProblemSpec& spec,
                                const DiagnosticsOptions& opts = {});

}  // namespace torusmf

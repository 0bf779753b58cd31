#pragma once

// The mean-field functional on sections u (frame coefficient):
//
//   J(u) = 1/2 int |du + u omega|^2 + (rho/|S|) int u - rho log int h e^u
//
// its weighted-L^2 gradient, and a projected minimizer over H1.

#include <string>
#include <vector>

#include "torusmf/bundle.hpp"
#include "torusmf/field.hpp"
#include "torusmf/grid.hpp"

namespace torusmf {

inline constexpr double kExponentLimit = 700.0;

struct ProblemSpec {
  TorusGrid grid;
  Connection conn;
  KernelBasis kb;
  ScalarField hweight;
  double rho = 0.0;
  // h e^{2v} h^2 per node, the quadrature weight of int h e^u.
  ScalarField h_area;
  std::string h_preset = "custom";
};

// Computes the kernel basis and checks min h > 0.
ProblemSpec make_problem(TorusGrid grid, Connection conn, ScalarField hweight, double rho,
                         std::string h_preset = "custom");
// "one", "exp-cos" (h = e^{cos 2 pi x}), "exp-cos:<amp>" (h = e^{amp cos 2 pi x}).
ScalarField h_preset_field(const TorusGrid& grid, const std::string& preset);
ProblemSpec with_rho(ProblemSpec spec, double rho);

// int h e^u dv_g; throws OverflowError when max u > 700.
double weighted_exp_integral(const ScalarField& u, const ProblemSpec& spec);

double evaluate_j(const ScalarField& u, const ProblemSpec& spec);

// The classical functional for omega = 0, computed independently of the
// bundle layer: the Dirichlet energy comes from the Fourier coefficients.
double classical_j(const ScalarField& u, const TorusGrid& grid, const ScalarField& hweight, double rho);

struct Residual {
  // H1 part of the gradient (equal to raw when dim = 0).
  ScalarField projected;
  // Delta_L u + rho/|S| - rho h e^u / mu
  ScalarField raw;
  // rho int (h e^u / mu - 1/|S|) tau1, by direct quadrature.
  double lambda1 = 0.0;
  // -<raw, tau1>, the same multiplier read off the projection.
  double lambda1_projection = 0.0;
  double mu = 0.0;
};

Residual el_residual(const ScalarField& u, const ProblemSpec& spec);

// || Delta_L u - rho (h e^u/mu - 1/|S|) + lambda1 tau1 ||_{L^2}
double full_el_residual(const ScalarField& u, const ProblemSpec& spec);

struct MinimizeOptions {
  double tol_factor = 1e-10;
  int max_iter = 50000;
  bool precondition = true;
  bool newton_polish = true;
  double newton_threshold = 1e-4;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_halvings = 60;
};

struct MinimizeResult {
  ScalarField u;
  double jvalue = 0.0;
  double mu = 0.0;
  double lambda1 = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  // rho >= 8 pi: the functional need not be bounded below.
  bool supercritical = false;
  // A trial step was rejected by the exponent guard.
  bool overflow_hit = false;
  int newton_steps = 0;
  std::vector<double> j_history;
};

MinimizeResult minimize(const ProblemSpec& spec, const ScalarField& init, const MinimizeOptions& opts = {});

}  // namespace torusmf

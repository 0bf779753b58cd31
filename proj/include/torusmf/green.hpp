#pragma once

// Green section of the bundle Laplacian with pole at a grid node p:
//
//   Delta_L G = 8 pi (delta_p - 1/|S|) - lambda1 tau1,   G orthogonal to tau1,
//
// its regular part A_p = lim (G + 4 log d_g(., p)) and the critical value
// built from it.

#include <cstddef>
#include <vector>

#include "torusmf/bundle.hpp"
#include "torusmf/functional.hpp"
#include "torusmf/grid.hpp"

namespace torusmf {

enum class Cutoff {
  Smooth,   // C-infinity ramp, e^{-2/t} / (e^{-2/t} + e^{-2/(1-t)})
  Quintic,  // C^2 ramp, 10 t^3 - 15 t^4 + 6 t^5
};

struct GreenOptions {
  Backend backend = Backend::Spectral;
  Cutoff cutoff = Cutoff::Smooth;
  double r0 = 0.125;
  double solvability_tol = 1e-8;
  SolveOptions solve{1e-13, 4000};
};

struct GreenData {
  Node p;
  // G away from p; G(p) holds A_p.
  ScalarField G;
  // G + 4 log d_g - A_p, zero at p.
  ScalarField eta;
  double A_p = 0.0;
  double lambda1 = 0.0;
  // int G dv_g
  double meanG = 0.0;
  // Component of the smooth right-hand side along tau1 before projection.
  double solvability_residual = 0.0;
  // Value standing in for G at p in quadratures over the torus.
  double pole_quadrature_value = 0.0;
  Backend backend = Backend::Spectral;
};

// Constant C with h^2 sum_{x != 0} g(x) log|x| + h^2 g(0) (log h + C) = int g log|x| + O(h^4 log h)
// for smooth g on the square lattice.
double log_lattice_constant();

// Radial cutoff: 1 on [0, r0], 0 beyond 2 r0; returns chi, chi', chi''.
struct CutoffValue {
  double chi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
CutoffValue cutoff(double r, double r0, Cutoff kind);

GreenData solve_green(Node p, const ProblemSpec& spec, const GreenOptions& opts = {});

// int G f dv_g, using the pole value at p.
double green_integral(const GreenData& gd, const ScalarField& f, const TorusGrid& grid);

struct RingFit {
  double constant = 0.0;
  double quadratic = 0.0;
  double anisotropic = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
};

// Least-squares fit of G + 4 log d_g over nodes with rmin <= r/h <= rmax
// against 1, r^2 and h^2 cos(4 theta) / r^2.
RingFit ring_fit(const GreenData& gd, const TorusGrid& grid, double rmin = 4.0, double rmax = 16.0);

// -8 pi - 4 pi A_p - 8 pi log pi - 8 pi log h(p) + (4 pi / |S|) int G
double critical_value(const GreenData& gd, const ProblemSpec& spec);

struct CriticalMap {
  std::size_t stride = 1;
  std::vector<Node> nodes;
  std::vector<double> values;
  Node argmin;
  Node argmax;
  double min = 0.0;
  double max = 0.0;
};

// Critical value at every stride-th node. Solves run on `threads` workers
// (0: hardware concurrency); results are assembled in node order.
CriticalMap critical_value_map(const ProblemSpec& spec, std::size_t stride, const GreenOptions& opts = {},
                               unsigned threads = 0);

}  // namespace torusmf

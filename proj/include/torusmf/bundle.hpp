#pragma once

// Real line bundle over the torus, trivialized by a global unit frame. A
// section is u times the frame; the connection one-form omega acts as
// D(u frame) = (du + u omega) frame.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torusmf/field.hpp"
#include "torusmf/grid.hpp"

namespace torusmf {

struct Connection {
  OneForm omega;
  // V = |omega|_g^2 + d* omega
  ScalarField potential;
  std::string preset = "custom";
};

Connection make_connection(OneForm omega, const TorusGrid& grid, std::string preset = "custom");
// "zero", "harmonic:a,b" (a dx + b dy), "exact:cos-x:amp" (d(amp cos 2 pi x)).
Connection connection_preset(const std::string& preset, const TorusGrid& grid);

struct KernelBasis {
  int dim = 0;
  std::optional<ScalarField> tau1;
  // Zero-mean primitive with df = omega.
  std::optional<ScalarField> f;
  // Quantities behind the classification.
  double curl_max = 0.0;
  double period_x = 0.0;
  double period_y = 0.0;
  double tolerance = 0.0;
};

// Kernel of D, decided from the holonomy: dim 1 iff omega is closed with
// zero periods, and then tau1 = e^{-f} / ||e^{-f}||.
KernelBasis kernel_basis(const Connection& conn, const TorusGrid& grid);

// || d tau1 + tau1 omega ||_{L^2}; zero when dim = 0.
double kernel_residual(const KernelBasis& kb, const Connection& conn, const TorusGrid& grid);

// u - <u, tau1> tau1, or u itself when dim = 0.
ScalarField project_h1(const ScalarField& u, const KernelBasis& kb, const TorusGrid& grid);

OneForm covariant_derivative(const ScalarField& u, const Connection& conn);
// int |du + u omega|_g^2 dv_g
double bundle_energy(const ScalarField& u, const Connection& conn, const TorusGrid& grid);
// Delta_g u + V u
ScalarField bundle_laplacian(const ScalarField& u, const Connection& conn, const TorusGrid& grid,
                             Backend backend = Backend::Spectral);

struct SolveOptions {
  double rtol = 1e-12;
  int max_iter = 2000;
};

// Preconditioned conjugate gradients for (Delta_L + shift) x = b in the
// weighted inner product. When dim = 1 and shift = 0 the operator is
// singular; the solve then runs on the range, i.e. b is first projected
// onto H1 and the returned x lies in H1.
class BundleSolver {
 public:
  BundleSolver(const Connection& conn, const KernelBasis& kb, const TorusGrid& grid,
               Backend backend = Backend::Spectral, double shift = 0.0);

  ScalarField apply(const ScalarField& u) const;
  ScalarField solve(const ScalarField& b, const SolveOptions& opts = {}) const;

  int last_iterations() const { return last_iterations_; }
  double last_residual() const { return last_residual_; }

 private:
  ScalarField precondition(const ScalarField& r) const;
  ScalarField apply_lifted(const ScalarField& u) const;

  Connection conn_;
  KernelBasis kb_;
  TorusGrid grid_;
  Backend backend_;
  double shift_;
  double lift_ = 0.0;
  std::vector<double> symbol_;
  mutable int last_iterations_ = 0;
  mutable double last_residual_ = 0.0;
};

struct EigenOptions {
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 7;
};

// 1 / lambda_min of Delta_L on H1, by block inverse iteration inside H1.
double poincare_constant(const Connection& conn, const KernelBasis& kb, const TorusGrid& grid,
                         const EigenOptions& opts = {});

struct EigenPair {
  double value = 0.0;
  ScalarField vector;
};

// The `count` smallest eigenpairs of Delta_L on the full space, by shifted
// block inverse iteration with Rayleigh-Ritz.
std::vector<EigenPair> lowest_eigenpairs(const Connection& conn, const KernelBasis& kb, const TorusGrid& grid,
                                         int count, const EigenOptions& opts = {});

}  // namespace torusmf

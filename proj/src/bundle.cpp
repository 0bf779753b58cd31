#include "torusmf/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "torusmf/errors.hpp"
#include "torusmf/kernels.hpp"
#include "torusmf/spectral.hpp"

namespace torusmf {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const ScalarField& f) { return kernels::active().max_abs(f.data(), f.size()); }

double mean(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s / static_cast<double>(f.size());
}

ScalarField random_field(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(n);
  for (double& x : f.values()) x = dist(rng);
  return f;
}

}  // namespace

Connection make_connection(OneForm omega, const TorusGrid& grid, std::string preset) {
  if (omega.n() != grid.n()) throw InvalidArgument("make_connection: omega shape does not match grid");
  if (!omega.c1.all_finite() || !omega.c2.all_finite()) throw InvalidArgument("make_connection: non-finite omega");
  Connection c;
  c.potential = pointwise_norm2(omega, grid);
  c.potential += codifferential(omega, grid);
  c.omega = std::move(omega);
  c.preset = std::move(preset);
  return c;
}

Connection connection_preset(const std::string& preset, const TorusGrid& grid) {
  const std::size_t n = grid.n();
  OneForm omega(n);
  if (preset == "zero") return make_connection(std::move(omega), grid, preset);
  if (preset.rfind("harmonic:", 0) == 0) {
    const std::string args = preset.substr(9);
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw InvalidArgument("connection preset '" + preset + "' needs a,b");
    const double a = std::stod(args.substr(0, comma));
    const double b = std::stod(args.substr(comma + 1));
    omega.c1 = ScalarField(n, a);
    omega.c2 = ScalarField(n, b);
    return make_connection(std::move(omega), grid, preset);
  }
  if (preset.rfind("exact:cos-x", 0) == 0) {
    double amp = 0.3;
    if (preset.size() > 11) {
      if (preset[11] != ':') throw InvalidArgument("unknown connection preset '" + preset + "'");
      amp = std::stod(preset.substr(12));
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) omega.c1(i, j) = -2.0 * kPi * amp * std::sin(2.0 * kPi * grid.coordinate(i));
    }
    return make_connection(std::move(omega), grid, preset);
  }
  throw InvalidArgument("unknown connection preset '" + preset + "'");
}

KernelBasis kernel_basis(const Connection& conn, const TorusGrid& grid) {
  const OneForm& w = conn.omega;
  KernelBasis kb;
  kb.tolerance = 1e-8 * (1.0 + std::max(max_abs(w.c1), max_abs(w.c2)));
  kb.curl_max = max_abs(curl(w));
  // For a closed form the line integral over every horizontal (vertical)
  // cycle equals the mean of c1 (c2).
  kb.period_x = mean(w.c1);
  kb.period_y = mean(w.c2);
  if (kb.curl_max > kb.tolerance || std::abs(kb.period_x) > kb.tolerance || std::abs(kb.period_y) > kb.tolerance) {
    kb.dim = 0;
    return kb;
  }

  const auto& t = spectral::Transform::get(grid.n());
  spectral::Spectrum s1 = t.forward(w.c1);
  spectral::Spectrum s2 = t.forward(w.c2);
  const std::size_t n = t.n(), cols = t.columns();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t k = r * cols + c;
      const double kx = t.nyquist_column(c) ? 0.0 : static_cast<double>(t.kx(c));
      const double ky = t.nyquist_row(r) ? 0.0 : static_cast<double>(t.ky(r));
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) {
        s1[k] = 0.0;
        continue;
      }
      // df = 2 pi i k f^  =>  f^ = -i (k . omega^) / (2 pi |k|^2)
      const std::complex<double> dot = kx * s1[k] + ky * s2[k];
      s1[k] = std::complex<double>(0.0, -1.0) * dot / (2.0 * kPi * k2);
    }
  }
  ScalarField f = t.inverse(std::move(s1));
  ScalarField tau(grid.n());
  for (std::size_t k = 0; k < tau.size(); ++k) tau[k] = std::exp(-f[k]);
  tau *= 1.0 / l2_norm(tau, grid);
  kb.dim = 1;
  kb.f = std::move(f);
  kb.tau1 = std::move(tau);
  return kb;
}

OneForm covariant_derivative(const ScalarField& u, const Connection& conn) {
  OneForm du = exterior_derivative(u);
  du.c1 += hadamard(u, conn.omega.c1);
  du.c2 += hadamard(u, conn.omega.c2);
  return du;
}

double kernel_residual(const KernelBasis& kb, const Connection& conn, const TorusGrid& grid) {
  if (kb.dim == 0) return 0.0;
  const OneForm d = covariant_derivative(*kb.tau1, conn);
  return std::sqrt(oneform_inner(d, d, grid));
}

ScalarField project_h1(const ScalarField& u, const KernelBasis& kb, const TorusGrid& grid) {
  if (kb.dim == 0) return u;
  ScalarField out = u;
  out.add_scaled(-l2_inner(u, *kb.tau1, grid), *kb.tau1);
  return out;
}

double bundle_energy(const ScalarField& u, const Connection& conn, const TorusGrid& grid) {
  const OneForm d = covariant_derivative(u, conn);
  return oneform_inner(d, d, grid);
}

ScalarField bundle_laplacian(const ScalarField& u, const Connection& conn, const TorusGrid& grid, Backend backend) {
  ScalarField out = laplacian(u, grid, backend);
  out += hadamard(conn.potential, u);
  return out;
}

BundleSolver::BundleSolver(const Connection& conn, const KernelBasis& kb, const TorusGrid& grid, Backend backend,
                           double shift)
    : conn_(conn), kb_(kb), grid_(grid), backend_(backend), shift_(shift) {
  if (shift < 0.0) throw InvalidArgument("BundleSolver: negative shift");
  const std::size_t n = grid.n();
  // Mean of e^{2v} V over nodes; the flat operator plus this constant is the
  // preconditioner's model of e^{2v} Delta_L.
  double s = 0.0;
  for (std::size_t k = 0; k < n * n; ++k) s += grid.conformal()[k] * conn.potential[k];
  s /= static_cast<double>(n * n);
  s = std::max(s, 0.0) + shift * grid.total_area();
  if (kb.dim == 1 && shift == 0.0) lift_ = 4.0 * kPi * kPi;

  const auto base = backend == Backend::Spectral ? spectral::laplacian_symbol(n)
                                                 : spectral::finite_difference_laplacian_symbol(n);
  symbol_.assign(base.begin(), base.end());
  const double zero_mode = s + lift_ * grid.total_area();
  for (std::size_t k = 0; k < symbol_.size(); ++k) {
    const double d = k == 0 ? zero_mode : symbol_[k] + s;
    symbol_[k] = 1.0 / std::max(d, 1e-3);
  }
}

ScalarField BundleSolver::apply(const ScalarField& u) const {
  ScalarField out = bundle_laplacian(u, conn_, grid_, backend_);
  if (shift_ != 0.0) out.add_scaled(shift_, u);
  return out;
}

ScalarField BundleSolver::apply_lifted(const ScalarField& u) const {
  ScalarField out = apply(u);
  if (lift_ != 0.0) out.add_scaled(lift_ * l2_inner(u, *kb_.tau1, grid_), *kb_.tau1);
  return out;
}

ScalarField BundleSolver::precondition(const ScalarField& r) const {
  return spectral::apply_symbol(hadamard(r, grid_.conformal()), symbol_);
}

ScalarField BundleSolver::solve(const ScalarField& b_in, const SolveOptions& opts) const {
  const ScalarField b = lift_ != 0.0 ? project_h1(b_in, kb_, grid_) : b_in;
  const double bnorm = l2_norm(b, grid_);
  ScalarField x(grid_.n());
  last_iterations_ = 0;
  last_residual_ = 0.0;
  if (bnorm == 0.0) return x;

  ScalarField r = b;
  ScalarField z = precondition(r);
  ScalarField p = z;
  double rz = l2_inner(r, z, grid_);
  for (int it = 1; it <= opts.max_iter; ++it) {
    const ScalarField ap = apply_lifted(p);
    const double alpha = rz / l2_inner(p, ap, grid_);
    x.add_scaled(alpha, p);
    r.add_scaled(-alpha, ap);
    const double rnorm = l2_norm(r, grid_);
    last_iterations_ = it;
    last_residual_ = rnorm / bnorm;
    if (last_residual_ <= opts.rtol) {
      return lift_ != 0.0 ? project_h1(x, kb_, grid_) : x;
    }
    z = precondition(r);
    const double rz_next = l2_inner(r, z, grid_);
    ScalarField pn = z;
    pn.add_scaled(rz_next / rz, p);
    p = std::move(pn);
    rz = rz_next;
  }
  throw ConvergenceError("bundle solve: no convergence after " + std::to_string(opts.max_iter) +
                         " iterations (relative residual " + std::to_string(last_residual_) + ")");
}

namespace {

// Block inverse iteration with Rayleigh-Ritz on the weighted inner product.
// `solve` applies the (shifted) inverse, `restrict` maps into the search
// space. Returns the `wanted` smallest Ritz pairs of `apply`.
template <class Solve, class Apply, class Restrict>
std::vector<EigenPair> subspace_iteration(const TorusGrid& grid, int wanted, int block, Solve solve, Apply apply,
                                          Restrict restrict, const EigenOptions& opts, const char* who) {
  std::mt19937_64 rng(opts.seed);
  std::vector<ScalarField> x;
  for (int b = 0; b < block; ++b) x.push_back(restrict(random_field(grid.n(), rng)));
  const int m = block;
  for (int it = 0; it < opts.max_iter; ++it) {
    std::vector<ScalarField> y, ay;
    for (const auto& xi : x) {
      y.push_back(restrict(solve(xi)));
      ay.push_back(restrict(apply(y.back())));
    }
    Eigen::MatrixXd gram(m, m), stiff(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        gram(a, b) = gram(b, a) = l2_inner(y[a], y[b], grid);
        stiff(a, b) = stiff(b, a) = 0.5 * (l2_inner(y[a], ay[b], grid) + l2_inner(ay[a], y[b], grid));
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(stiff, gram);
    if (ritz.info() != Eigen::Success) throw ConvergenceError(std::string(who) + ": Rayleigh-Ritz step failed");
    const Eigen::MatrixXd& c = ritz.eigenvectors();
    std::vector<EigenPair> pairs(m);
    bool converged = true;
    for (int a = 0; a < m; ++a) {
      ScalarField v(grid.n()), av(grid.n());
      for (int b = 0; b < m; ++b) {
        v.add_scaled(c(b, a), y[b]);
        av.add_scaled(c(b, a), ay[b]);
      }
      const double nv = l2_norm(v, grid);
      v *= 1.0 / nv;
      av *= 1.0 / nv;
      const double lambda = ritz.eigenvalues()(a);
      if (a < wanted) {
        ScalarField res = av;
        res.add_scaled(-lambda, v);
        if (l2_norm(res, grid) > opts.tol * std::max(1.0, std::abs(lambda))) converged = false;
      }
      pairs[a] = {lambda, std::move(v)};
    }
    if (converged) {
      pairs.resize(wanted);
      return pairs;
    }
    for (int a = 0; a < m; ++a) x[a] = std::move(pairs[a].vector);
  }
  throw ConvergenceError(std::string(who) + ": subspace iteration did not converge in " +
                         std::to_string(opts.max_iter) + " iterations");
}

}  // namespace

double poincare_constant(const Connection& conn, const KernelBasis& kb, const TorusGrid& grid,
                         const EigenOptions& opts) {
  BundleSolver solver(conn, kb, grid);
  const SolveOptions inner{1e-13, 2000};
  auto pairs = subspace_iteration(
      grid, 1, 8, [&](const ScalarField& x) { return solver.solve(x, inner); },
      [&](const ScalarField& x) { return bundle_laplacian(x, conn, grid); },
      [&](const ScalarField& x) { return project_h1(x, kb, grid); }, opts, "poincare_constant");
  if (!(pairs[0].value > 0.0)) throw ConvergenceError("poincare_constant: non-positive eigenvalue on H1");
  return 1.0 / pairs[0].value;
}

std::vector<EigenPair> lowest_eigenpairs(const Connection& conn, const KernelBasis& kb, const TorusGrid& grid,
                                         int count, const EigenOptions& opts) {
  if (count < 1) throw InvalidArgument("lowest_eigenpairs: count must be positive");
  BundleSolver solver(conn, kb, grid, Backend::Spectral, 1.0);
  const SolveOptions inner{1e-13, 2000};
  return subspace_iteration(
      grid, count, count + 6, [&](const ScalarField& x) { return solver.solve(x, inner); },
      [&](const ScalarField& x) { return bundle_laplacian(x, conn, grid); }, [](const ScalarField& x) { return x; },
      opts, "lowest_eigenpairs");
}

}  // namespace torusmf

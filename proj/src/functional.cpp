#include "torusmf/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "torusmf/errors.hpp"
#include "torusmf/kernels.hpp"
#include "torusmf/spectral.hpp"

namespace torusmf {

namespace {

constexpr double kPi = std::numbers::pi;

std::span<const double> smoothing_symbol(std::size_t n) {
  return spectral::cached_symbol(n, spectral::kSmoothingPreconditioner, [](long kx, long ky) {
    return 1.0 / (4.0 * kPi * kPi * static_cast<double>(kx * kx + ky * ky) + 1.0);
  });
}

void guard(const ScalarField& u) {
  const double m = kernels::active().max_value(u.data(), u.size());
  if (!(m <= kExponentLimit)) {
    throw OverflowError("exponent overflow: max u = " + std::to_string(m) + " exceeds " +
                        std::to_string(kExponentLimit));
  }
}

}  // namespace

ScalarField h_preset_field(const TorusGrid& grid, const std::string& preset) {
  const std::size_t n = grid.n();
  if (preset == "one") return ScalarField(n, 1.0);
  if (preset.rfind("exp-cos", 0) == 0) {
    double amp = 1.0;
    if (preset.size() > 7) {
      if (preset[7] != ':') throw InvalidArgument("unknown h preset '" + preset + "'");
      amp = std::stod(preset.substr(8));
    }
    ScalarField h(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) h(i, j) = std::exp(amp * std::cos(2.0 * kPi * grid.coordinate(i)));
    }
    return h;
  }
  throw InvalidArgument("unknown h preset '" + preset + "'");
}

ProblemSpec make_problem(TorusGrid grid, Connection conn, ScalarField hweight, double rho, std::string h_preset) {
  if (hweight.n() != grid.n()) throw InvalidArgument("make_problem: h has the wrong shape");
  if (conn.omega.n() != grid.n()) throw InvalidArgument("make_problem: connection has the wrong shape");
  for (double x : hweight.values()) {
    if (!(x > 0.0)) throw InvalidArgument("make_problem: h must be strictly positive");
  }
  if (!std::isfinite(rho)) throw InvalidArgument("make_problem: rho must be finite");
  ProblemSpec s;
  s.kb = kernel_basis(conn, grid);
  s.h_area = hadamard(hweight, grid.area_element());
  s.grid = std::move(grid);
  s.conn = std::move(conn);
  s.hweight = std::move(hweight);
  s.rho = rho;
  s.h_preset = std::move(h_preset);
  return s;
}

ProblemSpec with_rho(ProblemSpec spec, double rho) {
  spec.rho = rho;
  return spec;
}

double weighted_exp_integral(const ScalarField& u, const ProblemSpec& spec) {
  guard(u);
  std::vector<double> scratch(u.size());
  return kernels::active().exp_weighted(u.data(), spec.h_area.data(), scratch.data(), u.size());
}

double evaluate_j(const ScalarField& u, const ProblemSpec& spec) {
  const double mu = weighted_exp_integral(u, spec);
  const double area = spec.grid.total_area();
  return 0.5 * bundle_energy(u, spec.conn, spec.grid) + spec.rho / area * integrate(u, spec.grid) -
         spec.rho * std::log(mu);
}

double classical_j(const ScalarField& u, const TorusGrid& grid, const ScalarField& hweight, double rho) {
  const std::size_t n = grid.n();
  if (u.n() != n || hweight.n() != n) throw InvalidArgument("classical_j: shape mismatch");
  if (!(*std::max_element(u.values().begin(), u.values().end()) <= kExponentLimit)) {
    throw OverflowError("exponent overflow in classical_j");
  }
  // Discrete Parseval for the trigonometric gradient: each axis drops its own
  // Nyquist wave number.
  const auto& t = spectral::Transform::get(n);
  const spectral::Spectrum s = t.forward(u);
  const double n2 = static_cast<double>(n * n);
  double dirichlet = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < t.columns(); ++c) {
      const double kx = t.nyquist_column(c) ? 0.0 : static_cast<double>(t.kx(c));
      const double ky = t.nyquist_row(r) ? 0.0 : static_cast<double>(t.ky(r));
      const double mult = (c == 0 || t.nyquist_column(c)) ? 1.0 : 2.0;
      dirichlet += mult * 4.0 * kPi * kPi * (kx * kx + ky * ky) * std::norm(s[r * t.columns() + c]);
    }
  }
  dirichlet /= n2 * n2;

  const double h2 = grid.h() * grid.h();
  double area = 0.0, mean_part = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < n * n; ++k) {
    const double dv = std::exp(2.0 * grid.v()[k]) * h2;
    area += dv;
    mean_part += u[k] * dv;
    mass += hweight[k] * std::exp(u[k]) * dv;
  }
  return 0.5 * dirichlet + rho / area * mean_part - rho * std::log(mass);
}

Residual el_residual(const ScalarField& u, const ProblemSpec& spec) {
  guard(u);
  const TorusGrid& g = spec.grid;
  const double area = g.total_area();
  Residual res;
  ScalarField eu(g.n());
  res.mu = kernels::active().exp_weighted(u.data(), spec.h_area.data(), eu.data(), u.size());
  // density = h e^u / mu - 1/|S|
  ScalarField density = hadamard(spec.hweight, eu);
  density *= 1.0 / res.mu;
  for (double& x : density.values()) x -= 1.0 / area;

  res.raw = bundle_laplacian(u, spec.conn, g);
  res.raw.add_scaled(-spec.rho, density);
  if (spec.kb.dim == 1) {
    res.lambda1 = spec.rho * l2_inner(density, *spec.kb.tau1, g);
    res.lambda1_projection = -l2_inner(res.raw, *spec.kb.tau1, g);
  }
  res.projected = project_h1(res.raw, spec.kb, g);
  return res;
}

double full_el_residual(const ScalarField& u, const ProblemSpec& spec) {
  const Residual r = el_residual(u, spec);
  ScalarField full = r.raw;
  if (spec.kb.dim == 1) full.add_scaled(r.lambda1, *spec.kb.tau1);
  return l2_norm(full, spec.grid);
}

namespace {

struct State {
  ScalarField u;
  double j = 0.0;
  Residual res;
  double res_norm = 0.0;
};

State evaluate_state(ScalarField u, const ProblemSpec& spec) {
  State s;
  s.j = evaluate_j(u, spec);
  s.res = el_residual(u, spec);
  s.res_norm = l2_norm(s.res.projected, spec.grid);
  s.u = std::move(u);
  return s;
}

// H phi = Delta_L phi - rho (h e^u phi / mu - h e^u <h e^u, phi> / mu^2)
class Hessian {
 public:
  Hessian(const ProblemSpec& spec, const ScalarField& u, double mu) : spec_(spec), mu_(mu), heu_(u.n()) {
    for (std::size_t k = 0; k < u.size(); ++k) heu_[k] = spec.hweight[k] * std::exp(u[k]);
  }

  ScalarField apply(const ScalarField& phi) const {
    ScalarField out = bundle_laplacian(phi, spec_.conn, spec_.grid);
    const double m = l2_inner(heu_, phi, spec_.grid);
    out.add_scaled(-spec_.rho / mu_, hadamard(heu_, phi));
    out.add_scaled(spec_.rho * m / (mu_ * mu_), heu_);
    return project_h1(out, spec_.kb, spec_.grid);
  }

 private:
  const ProblemSpec& spec_;
  double mu_;
  ScalarField heu_;
};

ScalarField smooth(const ScalarField& r, const ProblemSpec& spec) {
  const ScalarField wr = spec.grid.flat() ? r : hadamard(r, spec.grid.conformal());
  return project_h1(spectral::apply_symbol(wr, smoothing_symbol(spec.grid.n())), spec.kb, spec.grid);
}

// Projected CG on the Hessian; false on negative curvature or stagnation.
bool newton_direction(const ProblemSpec& spec, const State& st, ScalarField& step) {
  const TorusGrid& g = spec.grid;
  const Hessian hess(spec, st.u, st.res.mu);
  ScalarField b = st.res.projected;
  b *= -1.0;
  const double bnorm = l2_norm(b, g);
  ScalarField x(g.n());
  ScalarField r = b;
  ScalarField z = smooth(r, spec);
  ScalarField p = z;
  double rz = l2_inner(r, z, g);
  for (int it = 0; it < 200; ++it) {
    const ScalarField hp = hess.apply(p);
    const double curv = l2_inner(p, hp, g);
    if (!(curv > 0.0)) return false;
    const double alpha = rz / curv;
    x.add_scaled(alpha, p);
    r.add_scaled(-alpha, hp);
    if (l2_norm(r, g) <= 1e-12 * bnorm) {
      step = project_h1(x, spec.kb, g);
      return true;
    }
    z = smooth(r, spec);
    const double rz_next = l2_inner(r, z, g);
    ScalarField pn = z;
    pn.add_scaled(rz_next / rz, p);
    p = std::move(pn);
    rz = rz_next;
  }
  // Rounding stalls CG near 1e-10; a step that solid is still worth trying.
  if (l2_norm(r, g) <= 1e-6 * bnorm) {
    step = project_h1(x, spec.kb, g);
    return true;
  }
  return false;
}

ScalarField trial_point(const State& st, double t, const ScalarField& d, const ProblemSpec& spec) {
  ScalarField u = st.u;
  u.add_scaled(t, d);
  return project_h1(u, spec.kb, spec.grid);
}

}  // namespace

MinimizeResult minimize(const ProblemSpec& spec, const ScalarField& init, const MinimizeOptions& opts) {
  const TorusGrid& g = spec.grid;
  if (init.n() != g.n()) throw InvalidArgument("minimize: init has the wrong shape");
  MinimizeResult out;
  out.supercritical = spec.rho >= 8.0 * kPi;

  if (spec.rho == 0.0) {
    // Quadratic problem: the minimizer over H1 is the zero section.
    out.u = ScalarField(g.n());
    out.jvalue = evaluate_j(out.u, spec);
    out.mu = weighted_exp_integral(out.u, spec);
    out.converged = true;
    out.j_history.push_back(out.jvalue);
    return out;
  }

  State st = evaluate_state(project_h1(init, spec.kb, g), spec);
  const double tol = opts.tol_factor * std::max(1.0, st.res_norm);
  out.j_history.push_back(st.j);

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (st.res_norm <= tol) {
      out.converged = true;
      break;
    }

    if (opts.newton_polish && st.res_norm < opts.newton_threshold) {
      ScalarField step;
      if (newton_direction(spec, st, step)) {
        bool taken = false;
        double t = 1.0;
        for (int k = 0; k < 10 && !taken; ++k, t *= 0.5) {
          try {
            State trial = evaluate_state(trial_point(st, t, step, spec), spec);
            if (trial.res_norm < st.res_norm && trial.j <= st.j + 1e-12 * std::max(1.0, std::abs(st.j))) {
              st = std::move(trial);
              taken = true;
            }
          } catch (const OverflowError&) {
            out.overflow_hit = true;
          }
        }
        if (taken) {
          ++out.newton_steps;
          out.j_history.push_back(st.j);
          continue;
        }
      }
    }

    const ScalarField d = [&] {
      ScalarField dir = opts.precondition ? smooth(st.res.projected, spec) : st.res.projected;
      dir *= -1.0;
      return dir;
    }();
    const double slope = l2_inner(st.res.projected, d, g);

    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k <= opts.max_halvings && !accepted; ++k, t *= opts.backtrack) {
      ScalarField u = trial_point(st, t, d, spec);
      try {
        const double j = evaluate_j(u, spec);
        if (j <= st.j + opts.armijo * t * slope) {
          st = evaluate_state(std::move(u), spec);
          accepted = true;
        }
      } catch (const OverflowError&) {
        out.overflow_hit = true;
      }
    }
    if (!accepted) {
      // Near the optimum the decrease in J drops below its rounding error;
      // fall back to asking for a smaller gradient.
      t = 1.0;
      for (int k = 0; k <= opts.max_halvings && !accepted; ++k, t *= opts.backtrack) {
        try {
          State trial = evaluate_state(trial_point(st, t, d, spec), spec);
          if (trial.res_norm < st.res_norm) {
            st = std::move(trial);
            accepted = true;
          }
        } catch (const OverflowError&) {
          out.overflow_hit = true;
        }
      }
    }
    if (!accepted) break;
    out.j_history.push_back(st.j);
  }
  if (!out.converged && st.res_norm <= tol) out.converged = true;

  out.iterations = it;
  out.jvalue = st.j;
  out.mu = st.res.mu;
  out.lambda1 = st.res.lambda1;
  out.residual = st.res_norm;
  out.u = std::move(st.u);
  return out;
}

}  // namespace torusmf

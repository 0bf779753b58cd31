#include "torusmf/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "torusmf/errors.hpp"
#include "torusmf/kernels.hpp"
#include "torusmf/spectral.hpp"

namespace torusmf {

TorusGrid build_grid(std::size_t n, ScalarField v, std::string v_preset) {
  if (n < 16 || !std::has_single_bit(n)) {
    throw InvalidArgument("build_grid: n must be a power of two >= 16, got " + std::to_string(n));
  }
  if (v.n() != n) throw InvalidArgument("build_grid: v has the wrong shape");
  if (!v.all_finite()) throw InvalidArgument("build_grid: v has non-finite entries");

  TorusGrid g;
  g.n_ = n;
  g.h_ = 1.0 / static_cast<double>(n);
  g.area_ = ScalarField(n);
  g.conf_ = ScalarField(n);
  g.inv_conf_ = ScalarField(n);
  g.flat_ = true;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] != 0.0) g.flat_ = false;
    g.conf_[k] = std::exp(2.0 * v[k]);
    g.inv_conf_[k] = std::exp(-2.0 * v[k]);
    g.area_[k] = g.conf_[k] * g.h_ * g.h_;
  }
  double total = 0.0;
  for (double a : g.area_.values()) total += a;
  g.total_area_ = total;
  g.v_ = std::move(v);
  g.v_preset_ = std::move(v_preset);
  return g;
}

ScalarField v_preset_field(std::size_t n, const std::string& v_preset) {
  ScalarField v(n);
  if (v_preset == "zero") return v;
  double amp = 0.1;
  if (v_preset.rfind("cos-x", 0) == 0) {
    if (v_preset.size() > 5) {
      if (v_preset[5] != ':') throw InvalidArgument("unknown v preset '" + v_preset + "'");
      amp = std::stod(v_preset.substr(6));
    }
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) v(i, j) = amp * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) * h);
    }
    return v;
  }
  throw InvalidArgument("unknown v preset '" + v_preset + "'");
}

TorusGrid build_grid(std::size_t n, const std::string& v_preset) {
  if (n < 16 || !std::has_single_bit(n)) {
    throw InvalidArgument("build_grid: n must be a power of two >= 16, got " + std::to_string(n));
  }
  return build_grid(n, v_preset_field(n, v_preset), v_preset);
}

namespace {

void require_shape(const ScalarField& f, const TorusGrid& grid, const char* what) {
  if (f.n() != grid.n()) throw InvalidArgument(std::string(what) + ": field shape does not match grid");
}

}  // namespace

double integrate(const ScalarField& f, const TorusGrid& grid) {
  require_shape(f, grid, "integrate");
  return kernels::active().dot(f.data(), grid.area_element().data(), f.size());
}

double l2_inner(const ScalarField& f, const ScalarField& g, const TorusGrid& grid) {
  require_shape(f, grid, "l2_inner");
  require_shape(g, grid, "l2_inner");
  return kernels::active().dot3(f.data(), g.data(), grid.area_element().data(), f.size());
}

double l2_norm(const ScalarField& f, const TorusGrid& grid) { return std::sqrt(l2_inner(f, f, grid)); }

double oneform_inner(const OneForm& s, const OneForm& x, const TorusGrid& grid) {
  require_shape(s.c1, grid, "oneform_inner");
  require_shape(x.c1, grid, "oneform_inner");
  const auto& k = kernels::active();
  const double h2 = grid.h() * grid.h();
  return h2 * (k.dot(s.c1.data(), x.c1.data(), s.c1.size()) + k.dot(s.c2.data(), x.c2.data(), s.c2.size()));
}

ScalarField pointwise_norm2(const OneForm& s, const TorusGrid& grid) {
  require_shape(s.c1, grid, "pointwise_norm2");
  ScalarField out(grid.n());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = grid.inverse_conformal()[k] * (s.c1[k] * s.c1[k] + s.c2[k] * s.c2[k]);
  }
  return out;
}

OneForm exterior_derivative(const ScalarField& u) {
  auto [dx, dy] = spectral::gradient(u);
  return OneForm(std::move(dx), std::move(dy));
}

ScalarField codifferential(const OneForm& s, const TorusGrid& grid) {
  require_shape(s.c1, grid, "codifferential");
  const auto& t = spectral::Transform::get(grid.n());
  // divergence assembled in Fourier space from both components
  spectral::Spectrum s1 = t.forward(s.c1);
  spectral::Spectrum s2 = t.forward(s.c2);
  const std::size_t n = t.n(), cols = t.columns();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t k = r * cols + c;
      const double kx = t.nyquist_column(c) ? 0.0 : two_pi * static_cast<double>(t.kx(c));
      const double ky = t.nyquist_row(r) ? 0.0 : two_pi * static_cast<double>(t.ky(r));
      const std::complex<double> div = std::complex<double>(0.0, kx) * s1[k] + std::complex<double>(0.0, ky) * s2[k];
      s1[k] = -div;
    }
  }
  ScalarField out = t.inverse(std::move(s1));
  return hadamard(out, grid.inverse_conformal());
}

ScalarField flat_laplacian(const ScalarField& u, Backend backend) {
  if (backend == Backend::Spectral) return spectral::apply_symbol(u, spectral::laplacian_symbol(u.n()));
  const std::size_t n = u.n();
  const double inv_h2 = static_cast<double>(n * n);
  ScalarField out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jp = (j + 1) % n, jm = (j + n - 1) % n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
      out(i, j) = inv_h2 * (4.0 * u(i, j) - u(ip, j) - u(im, j) - u(i, jp) - u(i, jm));
    }
  }
  return out;
}

ScalarField laplacian(const ScalarField& u, const TorusGrid& grid, Backend backend) {
  require_shape(u, grid, "laplacian");
  ScalarField out = flat_laplacian(u, backend);
  if (grid.flat()) return out;
  return hadamard(out, grid.inverse_conformal());
}

ScalarField curl(const OneForm& s) {
  ScalarField out = spectral::derivative(s.c2, 0);
  out -= spectral::derivative(s.c1, 1);
  return out;
}

double periodic_offset(double x, double a) {
  double d = x - a;
  d -= std::floor(d + 0.5);
  return d;
}

ScalarField distance_to(const TorusGrid& grid, Node p) {
  const std::size_t n = grid.n();
  ScalarField r(n);
  const double px = grid.coordinate(p.i), py = grid.coordinate(p.j);
  for (std::size_t j = 0; j < n; ++j) {
    const double dy = periodic_offset(grid.coordinate(j), py);
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = periodic_offset(grid.coordinate(i), px);
      r(i, j) = std::hypot(dx, dy);
    }
  }
  return r;
}

}  // namespace torusmf

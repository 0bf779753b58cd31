#include "torusmf/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "torusmf/errors.hpp"
#include "torusmf/kernels.hpp"

namespace torusmf::spectral {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Transform::Transform(std::size_t n) : n_(n) {
  const int ni = static_cast<int>(n);
  double* in = fftw_alloc_real(n * n);
  fftw_complex* out = fftw_alloc_complex(n * (n / 2 + 1));
  // ESTIMATE keeps the algorithm choice (and so the rounding) fixed run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_r2c_2d(ni, ni, in, out, flags);
  inverse_plan_ = fftw_plan_dft_c2r_2d(ni, ni, out, in, flags);
  fftw_free(in);
  fftw_free(out);
  if (!forward_plan_ || !inverse_plan_) throw Error("FFTW planning failed");
}

Transform::~Transform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

const Transform& Transform::get(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<Transform>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[n];
  if (!slot) slot.reset(new Transform(n));
  return *slot;
}

Spectrum Transform::forward(const ScalarField& f) const {
  if (f.n() != n_) throw InvalidArgument("Transform::forward: shape mismatch");
  Spectrum s(spectrum_size());
  // r2c does not modify its input
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(f.data()),
                       reinterpret_cast<fftw_complex*>(s.data()));
  return s;
}

ScalarField Transform::inverse(Spectrum s) const {
  if (s.size() != spectrum_size()) throw InvalidArgument("Transform::inverse: shape mismatch");
  std::vector<double> values(n_ * n_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(s.data()),
                       values.data());
  const double scale = 1.0 / static_cast<double>(n_ * n_);
  for (double& v : values) v *= scale;
  ScalarField out(n_);
  std::copy(values.begin(), values.end(), out.data());
  return out;
}

std::span<const double> cached_symbol(std::size_t n, int key, const std::function<double(long, long)>& make) {
  static std::mutex m;
  static std::map<std::pair<std::size_t, int>, std::vector<double>> cache;
  std::lock_guard lock(m);
  auto it = cache.find({n, key});
  if (it == cache.end()) {
    const Transform& t = Transform::get(n);
    std::vector<double> sym(t.spectrum_size());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < t.columns(); ++c) sym[r * t.columns() + c] = make(t.kx(c), t.ky(r));
    }
    it = cache.emplace(std::make_pair(n, key), std::move(sym)).first;
  }
  return it->second;
}

ScalarField apply_symbol(const ScalarField& f, std::span<const double> symbol) {
  const Transform& t = Transform::get(f.n());
  Spectrum s = t.forward(f);
  kernels::active().scale_complex(symbol.data(), s.data(), s.size());
  return t.inverse(std::move(s));
}

std::span<const double> laplacian_symbol(std::size_t n) {
  return cached_symbol(n, kSpectralLaplacian, [](long kx, long ky) {
    constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
    return four_pi2 * static_cast<double>(kx * kx + ky * ky);
  });
}

std::span<const double> finite_difference_laplacian_symbol(std::size_t n) {
  const double nd = static_cast<double>(n);
  return cached_symbol(n, kFiniteDifferenceLaplacian, [nd](long kx, long ky) {
    const double sx = std::sin(std::numbers::pi * static_cast<double>(kx) / nd);
    const double sy = std::sin(std::numbers::pi * static_cast<double>(ky) / nd);
    return 4.0 * nd * nd * (sx * sx + sy * sy);
  });
}

namespace {

// i * 2 pi k on one axis, zero at the Nyquist wave number.
void multiply_ik(const Transform& t, Spectrum& s, int axis) {
  const std::size_t n = t.n(), cols = t.columns();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const bool nyq = axis == 0 ? t.nyquist_column(c) : t.nyquist_row(r);
      const double k = axis == 0 ? static_cast<double>(t.kx(c)) : static_cast<double>(t.ky(r));
      auto& z = s[r * cols + c];
      z = nyq ? std::complex<double>{} : std::complex<double>(-two_pi * k * z.imag(), two_pi * k * z.real());
    }
  }
}

}  // namespace

ScalarField derivative(const ScalarField& f, int axis) {
  const Transform& t = Transform::get(f.n());
  Spectrum s = t.forward(f);
  multiply_ik(t, s, axis);
  return t.inverse(std::move(s));
}

std::pair<ScalarField, ScalarField> gradient(const ScalarField& f) {
  const Transform& t = Transform::get(f.n());
  Spectrum sx = t.forward(f);
  Spectrum sy = sx;
  multiply_ik(t, sx, 0);
  multiply_ik(t, sy, 1);
  return {t.inverse(std::move(sx)), t.inverse(std::move(sy))};
}

namespace {

// Cardinal function of even-n trigonometric interpolation at offset xi (torus units).
double periodic_sinc(double xi, std::size_t n) {
  xi -= std::round(xi);
  if (std::abs(xi) < 1e-15) return 1.0;
  const double nd = static_cast<double>(n);
  const double num = std::sin(nd * std::numbers::pi * xi);
  if (num == 0.0) return 0.0;
  return num / (nd * std::tan(std::numbers::pi * xi));
}

}  // namespace

std::vector<double> interpolate_tensor(const ScalarField& f, std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = f.n();
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> ex(xs.size() * n), ey(ys.size() * n);
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t i = 0; i < n; ++i) ex[a * n + i] = periodic_sinc(xs[a] - static_cast<double>(i) * h, n);
  }
  for (std::size_t b = 0; b < ys.size(); ++b) {
    for (std::size_t j = 0; j < n; ++j) ey[b * n + j] = periodic_sinc(ys[b] - static_cast<double>(j) * h, n);
  }
  const auto& k = kernels::active();
  // rows first: tmp(j, a) = sum_i f(i, j) ex(a, i)
  std::vector<double> tmp(n * xs.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t a = 0; a < xs.size(); ++a) tmp[j * xs.size() + a] = k.dot(f.data() + j * n, &ex[a * n], n);
  }
  std::vector<double> out(ys.size() * xs.size(), 0.0);
  for (std::size_t b = 0; b < ys.size(); ++b) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = ey[b * n + j];
      if (w == 0.0) continue;
      k.axpy(w, &tmp[j * xs.size()], &out[b * xs.size()], xs.size());
    }
  }
  return out;
}

}  // namespace torusmf::spectral

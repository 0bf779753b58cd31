#pragma once

// Real-to-complex Fourier transforms on the n x n periodic grid, backed by
// FFTW. Spectra are stored as n rows (y wave number) by n/2+1 columns
// (non-negative x wave number).

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "torusmf/field.hpp"

namespace torusmf::spectral {

using Spectrum = std::vector<std::complex<double>>;

class Transform {
 public:
  // Plans are created once per n and shared; execution is thread-safe.
  static const Transform& get(std::size_t n);

  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  std::size_t n() const { return n_; }
  std::size_t columns() const { return n_ / 2 + 1; }
  std::size_t spectrum_size() const { return n_ * columns(); }

  // Signed wave numbers of spectrum row r and column c.
  long ky(std::size_t r) const { return r <= n_ / 2 ? static_cast<long>(r) : static_cast<long>(r) - static_cast<long>(n_); }
  long kx(std::size_t c) const { return static_cast<long>(c); }
  bool nyquist_row(std::size_t r) const { return r == n_ / 2; }
  bool nyquist_column(std::size_t c) const { return c == n_ / 2; }

  // Unnormalized forward transform.
  Spectrum forward(const ScalarField& f) const;
  // Inverse transform including the 1/n^2 factor.
  ScalarField inverse(Spectrum s) const;

 private:
  explicit Transform(std::size_t n);
  std::size_t n_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

// Real multiplier evaluated once per (n, key) and cached.
std::span<const double> cached_symbol(std::size_t n, int key, const std::function<double(long kx, long ky)>& make);

// Multiplies the spectrum of f by a real symbol laid out like a Spectrum.
ScalarField apply_symbol(const ScalarField& f, std::span<const double> symbol);

// Symbol keys used across the library.
enum SymbolKey : int {
  kSpectralLaplacian = 1,    // 4 pi^2 |k|^2
  kFiniteDifferenceLaplacian, // 5-point stencil symbol
  kSmoothingPreconditioner,  // 1 / (4 pi^2 |k|^2 + 1)
};

std::span<const double> laplacian_symbol(std::size_t n);
std::span<const double> finite_difference_laplacian_symbol(std::size_t n);

// Partial derivative along x (axis 0) or y (axis 1); Nyquist modes dropped.
ScalarField derivative(const ScalarField& f, int axis);

// Both partials from a single forward transform.
std::pair<ScalarField, ScalarField> gradient(const ScalarField& f);

// Trigonometric interpolation at the tensor product of sample coordinates
// xs (fastest) and ys, in torus units. Returns ys.size() * xs.size() values.
std::vector<double> interpolate_tensor(const ScalarField& f, std::span<const double> xs, std::span<const double> ys);

}  // namespace torusmf::spectral

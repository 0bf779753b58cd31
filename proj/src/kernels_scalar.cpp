#include "torusmf/kernels.hpp"

#include <cmath>
#include <limits>

namespace torusmf::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3(const double* a, const double* b, const double* w, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * w[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double exp_weighted(const double* u, const double* w, double* out, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(u[i]);
    s += w[i] * out[i];
  }
  return s;
}

void scale_complex(const double* symbol, std::complex<double>* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] *= symbol[i];
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double max_value(const double* a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, a[i]);
  return m;
}

constexpr Table kScalar{"scalar", dot, dot3, axpy, mul, exp_weighted, scale_complex, max_abs, max_value};

}  // namespace

const Table& scalar() { return kScalar; }

}  // namespace torusmf::kernels

#pragma once

// Data-parallel inner loops used by every grid operation.
//
// Each kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2/FMA variant. The active table is picked once at runtime from the
// CPU feature bits; TORUSMF_SIMD=scalar in the environment forces the
// reference path. Both tables are reachable directly so tests can check
// them against each other.
//
// Reductions use a fixed accumulation order inside each variant, so a given
// variant is bitwise reproducible run to run. The two variants agree only up
// to rounding.

#include <complex>
#include <cstddef>
#include <string_view>

namespace torusmf::kernels {

struct Table {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i] * b[i] * w[i]
  double (*dot3)(const double* a, const double* b, const double* w, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = exp(u[i]); returns sum_i w[i] * out[i]
  double (*exp_weighted)(const double* u, const double* w, double* out, std::size_t n);
  // data[i] *= symbol[i] (complex by real)
  void (*scale_complex)(const double* symbol, std::complex<double>* data, std::size_t n);
  // max_i |a[i]|
  double (*max_abs)(const double* a, std::size_t n);
  // max_i a[i]
  double (*max_value)(const double* a, std::size_t n);
};

const Table& scalar();

// nullptr when the build or the CPU lacks AVX2+FMA.
const Table* avx2();

const Table& active();

}  // namespace torusmf::kernels

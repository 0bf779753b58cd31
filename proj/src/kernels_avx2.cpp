// Compiled with -mavx2 -mfma; only entered after a runtime CPU check.

#include "torusmf/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace torusmf::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

// exp for |x| <= 709; below -708 flushes to zero (the scalar path would
// return a subnormal there).
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d lo_bound = _mm256_set1_pd(-708.0);
  const __m256d hi_bound = _mm256_set1_pd(709.0);

  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_bound), hi_bound);
  __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, xc);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  // Taylor to degree 13 on |r| <= ln2/2; truncation below 1e-17 relative.
  static constexpr double c[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          0.5,               1.0,              1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  __m256d biased = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), magic);
  __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  __m256d scale = _mm256_castsi256_pd(bits);
  __m256d res = _mm256_mul_pd(p, scale);

  __m256d under = _mm256_cmp_pd(x, lo_bound, _CMP_LT_OQ);
  res = _mm256_andnot_pd(under, res);
  __m256d over = _mm256_cmp_pd(x, hi_bound, _CMP_GT_OQ);
  res = _mm256_blendv_pd(res, _mm256_set1_pd(std::numeric_limits<double>::infinity()), over);
  return res;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3(const double* a, const double* b, const double* w, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    s0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(w + i), s0);
    s1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(w + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i] * w[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

double exp_weighted(const double* u, const double* w, double* out, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d e = exp4(_mm256_loadu_pd(u + i));
    _mm256_storeu_pd(out + i, e);
    s = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), e, s);
  }
  double acc = hsum(s);
  for (; i < n; ++i) {
    out[i] = std::exp(u[i]);
    acc += w[i] * out[i];
  }
  return acc;
}

void scale_complex(const double* symbol, std::complex<double>* data, std::size_t n) {
  // Two complex values per register: duplicate each real symbol into both lanes.
  double* d = reinterpret_cast<double*>(data);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m128d s2 = _mm_loadu_pd(symbol + i);
    __m256d s = _mm256_permute4x64_pd(_mm256_castpd128_pd256(s2), 0x50);
    _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(d + 2 * i), s));
  }
  for (; i < n; ++i) data[i] *= symbol[i];
}

double max_abs(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, std::abs(a[i]));
  return r;
}

double max_value(const double* a, std::size_t n) {
  double r = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d m = _mm256_loadu_pd(a);
    for (i = 4; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(a + i));
    r = hmax(m);
  }
  for (; i < n; ++i) r = std::max(r, a[i]);
  return r;
}

}  // namespace

extern const Table kAvx2Table;
const Table kAvx2Table{"avx2", dot, dot3, axpy, mul, exp_weighted, scale_complex, max_abs, max_value};

}  // namespace torusmf::kernels

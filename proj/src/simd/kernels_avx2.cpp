// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// runtime CPU check, so nothing here may run on a CPU without AVX2.
#include "tdas/simd.hpp"

#include <immintrin.h>

#include <cmath>

namespace tdas::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void scale_avx2(double alpha, const double* x, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

void multiply_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void add_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void subtract_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void langevin_step_avx2(double* x, const double* score, const double* noise, double half_eps,
                        double sqrt_eps, std::size_t n) {
  const __m256d vh = _mm256_set1_pd(half_eps);
  const __m256d vs = _mm256_set1_pd(sqrt_eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fmadd_pd(vh, _mm256_loadu_pd(score + i), _mm256_loadu_pd(x + i));
    v = _mm256_fmadd_pd(vs, _mm256_loadu_pd(noise + i), v);
    _mm256_storeu_pd(x + i, v);
  }
  for (; i < n; ++i) x[i] = std::fma(sqrt_eps, noise[i], std::fma(half_eps, score[i], x[i]));
}

bool all_finite_avx2(const double* a, std::size_t n) {
  // x - x is NaN exactly when x is NaN or +-Inf.
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_add_pd(acc, _mm256_sub_pd(v, v));
  }
  if (_mm256_movemask_pd(_mm256_cmp_pd(acc, acc, _CMP_UNORD_Q)) != 0) return false;
  for (; i < n; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

// Complex multiply of two packed pairs: (ar + i ai)(br + i bi).
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);         // br br
  const __m256d b_im = _mm256_permute_pd(b, 0b1111);  // bi bi
  const __m256d a_sw = _mm256_permute_pd(a, 0b0101);  // ai ar
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

void fft_stage_avx2(cplx* data, const cplx* tw, std::size_t n, std::size_t half) {
  auto* d = reinterpret_cast<double*>(data);
  const auto* t = reinterpret_cast<const double*>(tw);
  if (half == 1) {
    // twiddle is 1: plain sum/difference of adjacent complex values.
    for (std::size_t base = 0; base < n; base += 2) {
      const __m128d a = _mm_loadu_pd(d + 2 * base);
      const __m128d b = _mm_loadu_pd(d + 2 * base + 2);
      _mm_storeu_pd(d + 2 * base, _mm_add_pd(a, b));
      _mm_storeu_pd(d + 2 * base + 2, _mm_sub_pd(a, b));
    }
    return;
  }
  const std::size_t span = 2 * half;
  for (std::size_t base = 0; base < n; base += span) {
    double* lo = d + 2 * base;
    double* hi = d + 2 * (base + half);
    for (std::size_t j = 0; j < half; j += 2) {
      const __m256d a = _mm256_loadu_pd(lo + 2 * j);
      const __m256d b = _mm256_loadu_pd(hi + 2 * j);
      const __m256d w = _mm256_loadu_pd(t + 2 * j);
      const __m256d prod = cmul(b, w);
      _mm256_storeu_pd(lo + 2 * j, _mm256_add_pd(a, prod));
      _mm256_storeu_pd(hi + 2 * j, _mm256_sub_pd(a, prod));
    }
  }
}

void complex_multiply_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const auto* pa = reinterpret_cast<const double*>(a);
  const auto* pb = reinterpret_cast<const double*>(b);
  auto* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    _mm256_storeu_pd(po + 2 * i, cmul(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(std::fma(ar, br, -ai * bi), std::fma(ar, bi, ai * br));
  }
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{
      "avx2",         dot_avx2,           squared_distance_avx2, sum_avx2,
      axpy_avx2,      scale_avx2,         multiply_avx2,         add_avx2,
      subtract_avx2,  langevin_step_avx2, all_finite_avx2,       fft_stage_avx2,
      complex_multiply_avx2,
  };
  return table;
}

}  // namespace tdas::simd::detail

#include "tdas/simd.hpp"

#include <cmath>

namespace tdas::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

void multiply_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void subtract_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void langevin_step_scalar(double* x, const double* score, const double* noise, double half_eps,
                          double sqrt_eps, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] + half_eps * score[i] + sqrt_eps * noise[i];
}

bool all_finite_scalar(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

void fft_stage_scalar(cplx* data, const cplx* tw, std::size_t n, std::size_t half) {
  const std::size_t span = 2 * half;
  for (std::size_t base = 0; base < n; base += span) {
    for (std::size_t j = 0; j < half; ++j) {
      const double ar = data[base + j].real();
      const double ai = data[base + j].imag();
      const double br = data[base + j + half].real();
      const double bi = data[base + j + half].imag();
      const double wr = tw[j].real();
      const double wi = tw[j].imag();
      const double tr = br * wr - bi * wi;
      const double ti = br * wi + bi * wr;
      data[base + j] = cplx(ar + tr, ai + ti);
      data[base + j + half] = cplx(ar - tr, ai - ti);
    }
  }
}

void complex_multiply_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{
      "scalar",         dot_scalar,           squared_distance_scalar, sum_scalar,
      axpy_scalar,      scale_scalar,         multiply_scalar,         add_scalar,
      subtract_scalar,  langevin_step_scalar, all_finite_scalar,       fft_stage_scalar,
      complex_multiply_scalar,
  };
  return table;
}

}  // namespace tdas::simd

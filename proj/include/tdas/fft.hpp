#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace tdas {

using cplx = std::complex<double>;

// Unnormalized complex DFT of a fixed length.
//
// Powers of two run an iterative radix-2 decimation-in-time transform whose
// butterfly stages go through the dispatched SIMD kernels. Every other length
// uses Bluestein's chirp-z algorithm on a power-of-two convolution of size
// >= 2n - 1, so odd and prime sizes stay O(n log n).
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  // X[k] = sum_j x[j] exp(-2 pi i jk / n), in place.
  void forward(cplx* data) const;
  // x[j] = sum_k X[k] exp(+2 pi i jk / n), in place, no 1/n factor.
  void backward(cplx* data) const;

  // Shared, lazily built plan for length n. Thread-safe.
  static std::shared_ptr<const FftPlan> get(std::size_t n);

 private:
  void forward_pow2(cplx* data) const;
  void forward_bluestein(cplx* data) const;

  std::size_t n_;
  bool pow2_;
  // radix-2 state
  std::vector<std::size_t> bitrev_;
  std::vector<std::vector<cplx>> stage_twiddles_;
  // Bluestein state
  std::vector<cplx> chirp_;          // exp(-i pi k^2 / n), k < n
  std::vector<cplx> kernel_fft_;     // FFT of the conjugate chirp, zero padded to m
  std::shared_ptr<const FftPlan> inner_;
};

// Orthonormal DCT-II of a fixed length through one complex FFT of the same
// length (even/odd reordering, then a quarter-wave twiddle).
class DctPlan {
 public:
  explicit DctPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  // out may alias in. scratch must hold n complex values.
  void forward(const double* in, double* out, cplx* scratch) const;
  void inverse(const double* in, double* out, cplx* scratch) const;
  // Two transforms for the price of one FFT (the inputs ride the real and
  // imaginary parts). Outputs may alias their inputs.
  void forward_pair(const double* a, const double* b, double* out_a, double* out_b, cplx* scratch) const;
  void inverse_pair(const double* a, const double* b, double* out_a, double* out_b, cplx* scratch) const;

  static std::shared_ptr<const DctPlan> get(std::size_t n);

 private:
  std::size_t n_;
  std::shared_ptr<const FftPlan> fft_;
  std::vector<double> weight_;  // sqrt(1/n) at k = 0, sqrt(2/n) otherwise
  std::vector<double> inv_weight_;
  std::vector<cplx> phase_;     // exp(-i pi k / (2n))
};

}  // namespace tdas

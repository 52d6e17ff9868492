#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Data-parallel inner loops. Every kernel exists as a portable scalar
// reference and, on x86-64, as an AVX2+FMA variant. The active table is
// chosen once at startup from the CPU feature set; TDAS_SIMD=scalar|avx2
// overrides the choice. Reductions in the vector variants use a different
// summation order, so results agree with the scalar kernels to rounding,
// not bit-for-bit. A given table is fully deterministic.
namespace tdas::simd {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = alpha * x
  void (*scale)(double alpha, const double* x, double* out, std::size_t n);
  // out = a * b (elementwise); out may alias a or b
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
  // out = a + b / a - b
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*subtract)(const double* a, const double* b, double* out, std::size_t n);

  // x += half_eps * score + sqrt_eps * noise
  void (*langevin_step)(double* x, const double* score, const double* noise, double half_eps,
                        double sqrt_eps, std::size_t n);

  bool (*all_finite)(const double* a, std::size_t n);

  // One radix-2 decimation-in-time stage over a bit-reversed buffer of length n.
  // `half` is the butterfly span; twiddles[j] = exp(-2 pi i j / (2 half)), j < half.
  void (*fft_stage)(cplx* data, const cplx* twiddles, std::size_t n, std::size_t half);

  // out[k] = a[k] * b[k] over complex values
  void (*complex_multiply)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
// nullptr when the CPU or the build lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

// The table every module uses.
const KernelTable& active() noexcept;

// Override the active table ("scalar", "avx2", "auto"). Returns false when unavailable.
// Not thread-safe with concurrent kernel use; intended for process startup and tests.
bool select(std::string_view name) noexcept;

}  // namespace tdas::simd

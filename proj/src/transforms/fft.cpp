#include "tdas/fft.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "tdas/error.hpp"
#include "tdas/simd.hpp"

namespace tdas {

namespace {

template <class Plan>
std::shared_ptr<const Plan> cached(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const Plan>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  // Build outside the lock: Bluestein plans recurse into get() for their inner size.
  auto plan = std::make_shared<const Plan>(n);
  std::lock_guard lock(mu);
  return cache.emplace(n, std::move(plan)).first->second;
}

cplx unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(std::has_single_bit(n)) {
  if (n == 0) throw DomainError("FFT length must be >= 1");
  if (pow2_) {
    const int bits = std::countr_zero(n);
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      bitrev_[i] = r;
    }
    for (std::size_t half = 1; half < n; half *= 2) {
      std::vector<cplx> tw(half);
      for (std::size_t j = 0; j < half; ++j)
        tw[j] = unit(-std::numbers::pi * static_cast<double>(j) / static_cast<double>(half));
      stage_twiddles_.push_back(std::move(tw));
    }
    return;
  }
  const std::size_t m = std::bit_ceil(2 * n - 1);
  inner_ = FftPlan::get(m);
  chirp_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle small, so the chirp stays accurate for large n.
    const std::size_t k2 = (k * k) % (2 * n);
    chirp_[k] = unit(-std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
  }
  kernel_fft_.assign(m, cplx{});
  kernel_fft_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) kernel_fft_[k] = kernel_fft_[m - k] = std::conj(chirp_[k]);
  inner_->forward(kernel_fft_.data());
}

void FftPlan::forward(cplx* data) const {
  if (n_ == 1) return;
  if (pow2_)
    forward_pow2(data);
  else
    forward_bluestein(data);
}

void FftPlan::backward(cplx* data) const {
  for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
  forward(data);
  for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
}

void FftPlan::forward_pow2(cplx* data) const {
  for (std::size_t i = 0; i < n_; ++i)
    if (const std::size_t j = bitrev_[i]; i < j) std::swap(data[i], data[j]);
  const auto& k = simd::active();
  std::size_t half = 1;
  for (const auto& tw : stage_twiddles_) {
    k.fft_stage(data, tw.data(), n_, half);
    half *= 2;
  }
}

void FftPlan::forward_bluestein(cplx* data) const {
  const std::size_t m = inner_->size();
  const auto& k = simd::active();
  std::vector<cplx> buf(m, cplx{});
  k.complex_multiply(data, chirp_.data(), buf.data(), n_);
  inner_->forward(buf.data());
  k.complex_multiply(buf.data(), kernel_fft_.data(), buf.data(), m);
  inner_->backward(buf.data());
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < n_; ++i) buf[i] *= inv;
  k.complex_multiply(buf.data(), chirp_.data(), data, n_);
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t n) { return cached<FftPlan>(n); }

DctPlan::DctPlan(std::size_t n) : n_(n) {
  if (n == 0) throw DomainError("DCT length must be >= 1");
  fft_ = FftPlan::get(n);
  weight_.resize(n);
  inv_weight_.resize(n);
  phase_.resize(n);
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    weight_[k] = k == 0 ? std::sqrt(1.0 / dn) : std::sqrt(2.0 / dn);
    inv_weight_[k] = 1.0 / weight_[k];
    phase_[k] = unit(-std::numbers::pi * static_cast<double>(k) / (2.0 * dn));
  }
}

void DctPlan::forward(const double* in, double* out, cplx* v) const {
  const std::size_t n = n_;
  // v = [x0, x2, x4, ..., x5, x3, x1]
  for (std::size_t i = 0; 2 * i < n; ++i) v[i] = in[2 * i];
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) v[n - 1 - i] = in[2 * i + 1];
  fft_->forward(v);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = weight_[k] * (phase_[k].real() * v[k].real() - phase_[k].imag() * v[k].imag());
}

void DctPlan::inverse(const double* in, double* out, cplx* v) const {
  const std::size_t n = n_;
  // With Y the unweighted coefficients: V[k] = exp(+i pi k / 2n) (Y[k] - i Y[n-k]), Y[n] = 0.
  for (std::size_t k = 0; k < n; ++k) {
    const double yk = in[k] * inv_weight_[k];
    const double ynk = k == 0 ? 0.0 : in[n - k] * inv_weight_[n - k];
    v[k] = std::conj(phase_[k]) * cplx(yk, -ynk);
  }
  fft_->backward(v);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; 2 * i < n; ++i) out[2 * i] = v[i].real() * inv;
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) out[2 * i + 1] = v[n - 1 - i].real() * inv;
}

void DctPlan::forward_pair(const double* a, const double* b, double* out_a, double* out_b, cplx* v) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; 2 * i < n; ++i) v[i] = cplx(a[2 * i], b[2 * i]);
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) v[n - 1 - i] = cplx(a[2 * i + 1], b[2 * i + 1]);
  fft_->forward(v);
  // Split Z = A + iB using A[k] = (Z[k] + conj Z[n-k]) / 2, B[k] = (Z[k] - conj Z[n-k]) / 2i.
  // Only the real part of phase * A (resp. B) is needed.
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z = v[k];
    const cplx zc = std::conj(v[k == 0 ? 0 : n - k]);
    const cplx ak = 0.5 * (z + zc);
    const cplx bk = cplx(0.0, -0.5) * (z - zc);
    const cplx p = phase_[k];
    out_a[k] = weight_[k] * (p.real() * ak.real() - p.imag() * ak.imag());
    out_b[k] = weight_[k] * (p.real() * bk.real() - p.imag() * bk.imag());
  }
}

void DctPlan::inverse_pair(const double* a, const double* b, double* out_a, double* out_b, cplx* v) const {
  const std::size_t n = n_;
  for (std::size_t k = 0; k < n; ++k) {
    const double ak = a[k] * inv_weight_[k];
    const double ank = k == 0 ? 0.0 : a[n - k] * inv_weight_[n - k];
    const double bk = b[k] * inv_weight_[k];
    const double bnk = k == 0 ? 0.0 : b[n - k] * inv_weight_[n - k];
    const cplx p = std::conj(phase_[k]);
    v[k] = p * cplx(ak, -ank) + cplx(0.0, 1.0) * (p * cplx(bk, -bnk));
  }
  fft_->backward(v);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; 2 * i < n; ++i) {
    out_a[2 * i] = v[i].real() * inv;
    out_b[2 * i] = v[i].imag() * inv;
  }
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) {
    out_a[2 * i + 1] = v[n - 1 - i].real() * inv;
    out_b[2 * i + 1] = v[n - 1 - i].imag() * inv;
  }
}

std::shared_ptr<const DctPlan> DctPlan::get(std::size_t n) { return cached<DctPlan>(n); }

}  // namespace tdas

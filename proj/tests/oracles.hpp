#pragma once

// Definition-level reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "tdas/tensor.hpp"
#include "tdas/transforms.hpp"

namespace tdas::oracle {

inline double dct_weight(std::size_t k, std::size_t d) {
  return k == 0 ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d);
}

// Orthonormal DCT-II matrix, row k = output frequency.
inline std::vector<double> dct_matrix(std::size_t d) {
  std::vector<double> m(d * d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t n = 0; n < d; ++n)
      m[k * d + n] = dct_weight(k, d) * std::cos(std::numbers::pi * (n + 0.5) * k / d);
  return m;
}

inline std::vector<double> naive_dct1(const std::vector<double>& v) {
  const std::size_t d = v.size();
  const auto m = dct_matrix(d);
  std::vector<double> out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t n = 0; n < d; ++n) out[k] += m[k * d + n] * v[n];
  return out;
}

// Full double sum over both axes.
inline Tensor naive_dct2(const Tensor& x) {
  const std::size_t H = x.height(), W = x.width();
  const auto mh = dct_matrix(H);
  const auto mw = dct_matrix(W);
  Tensor out(x.shape());
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t k = 0; k < H; ++k)
      for (std::size_t l = 0; l < W; ++l) {
        double s = 0.0;
        for (std::size_t m = 0; m < H; ++m)
          for (std::size_t n = 0; n < W; ++n) s += mh[k * H + m] * mw[l * W + n] * x(c, m, n);
        out(c, k, l) = s;
      }
  return out;
}

inline SpectrumGrid naive_dft2(const Tensor& x) {
  const std::size_t H = x.height(), W = x.width();
  SpectrumGrid s{Tensor(x.shape()), Tensor(x.shape())};
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t k = 0; k < H; ++k)
      for (std::size_t l = 0; l < W; ++l) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < H; ++m)
          for (std::size_t n = 0; n < W; ++n) {
            // Reduce the phase index exactly before converting to an angle.
            const double frac = static_cast<double>((k * m) % H) / H + static_cast<double>((l * n) % W) / W;
            acc += x(c, m, n) * std::polar(1.0, -2.0 * std::numbers::pi * frac);
          }
        s.re(c, k, l) = acc.real();
        s.im(c, k, l) = acc.imag();
      }
  return s;
}

// Transpose of the DCT matrix on both axes.
inline Tensor naive_idct2(const Tensor& y) {
  const std::size_t H = y.height(), W = y.width();
  const auto mh = dct_matrix(H);
  const auto mw = dct_matrix(W);
  Tensor out(y.shape());
  for (std::size_t c = 0; c < y.channels(); ++c)
    for (std::size_t m = 0; m < H; ++m)
      for (std::size_t n = 0; n < W; ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k < H; ++k)
          for (std::size_t l = 0; l < W; ++l) s += mh[k * H + m] * mw[l * W + n] * y(c, k, l);
        out(c, m, n) = s;
      }
  return out;
}

inline Tensor naive_idft2_real(const SpectrumGrid& s) {
  const std::size_t H = s.re.height(), W = s.re.width();
  Tensor out(s.re.shape());
  for (std::size_t c = 0; c < s.re.channels(); ++c)
    for (std::size_t m = 0; m < H; ++m)
      for (std::size_t n = 0; n < W; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < H; ++k)
          for (std::size_t l = 0; l < W; ++l) {
            const double frac = static_cast<double>((k * m) % H) / H + static_cast<double>((l * n) % W) / W;
            const std::complex<double> v(s.re(c, k, l), s.im(c, k, l));
            acc += (v * std::polar(1.0, 2.0 * std::numbers::pi * frac)).real();
          }
        out(c, m, n) = acc / static_cast<double>(H * W);
      }
  return out;
}

}  // namespace tdas::oracle

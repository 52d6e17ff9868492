#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdas/tensor.hpp"

namespace tdas {

enum class TransformKind { DCT, DFT };

std::string to_string(TransformKind k);
// Accepts "dct" / "dft" (any case). Throws DomainError otherwise.
TransformKind parse_transform(std::string_view s);

// Orthonormal DCT-II: out[k] = w(k) sum_n v[n] cos(pi (n + 1/2) k / d),
// w(0) = sqrt(1/d), w(k) = sqrt(2/d).
std::vector<double> dct1(std::span<const double> v);
// Transpose (= inverse) of dct1.
std::vector<double> idct1(std::span<const double> v);

// Per-channel separable DCT: every row, then every column.
Tensor dct2(const Tensor& t);
Tensor idct2(const Tensor& t);
// Single-axis passes; dct2 == dct_cols(dct_rows(x)) == dct_rows(dct_cols(x)).
Tensor dct_rows(const Tensor& t);
Tensor dct_cols(const Tensor& t);

// Complex C x H x W grid stored as separate real / imaginary planes.
struct SpectrumGrid {
  Tensor re;
  Tensor im;

  const Shape& shape() const noexcept { return re.shape(); }
};

// Unnormalized 2D DFT per channel: S(h, w) = sum x(m, n) exp(-2 pi i (hm/H + wn/W)).
SpectrumGrid dft2(const Tensor& t);
// Real part of the inverse (with the 1/(HW) factor).
Tensor idft2_real(const SpectrumGrid& s);

// inverse(mask * forward(scale * x)) in one pass over each channel. scale may
// be null. For DFT the result is the real part of the inverse. Equal to the
// composition of the functions above up to rounding. DFT masks symmetric under
// (h, w) -> (-h, -w), which includes every mask build_freq_mask makes, take a
// faster path that packs two real rows per complex FFT.
Tensor spectral_filter(const Tensor& x, const Tensor* scale, const Tensor& mask, TransformKind kind);

// A real orthogonal map on C x H x W tensors.
class OrthogonalMap {
 public:
  virtual ~OrthogonalMap() = default;
  virtual Tensor forward(const Tensor& x) const = 0;
  virtual Tensor inverse(const Tensor& x) const = 0;
  virtual std::string name() const = 0;
};

class DctMap final : public OrthogonalMap {
 public:
  Tensor forward(const Tensor& x) const override { return dct2(x); }
  Tensor inverse(const Tensor& x) const override { return idct2(x); }
  std::string name() const override { return "dct"; }
};

// Uniformly random permutation of all C*H*W coordinates (Fisher-Yates, seeded).
class PermutationMap final : public OrthogonalMap {
 public:
  PermutationMap(Shape shape, std::uint64_t seed);

  Tensor forward(const Tensor& x) const override;
  Tensor inverse(const Tensor& x) const override;
  std::string name() const override { return "permutation"; }

  const std::vector<std::size_t>& permutation() const noexcept { return perm_; }

 private:
  Shape shape_;
  std::vector<std::size_t> perm_;  // forward(x)[i] = x[perm_[i]]
};

}  // namespace tdas

#pragma once

#include "json.hpp"
#include "tdas/dataset.hpp"
#include "tdas/tensor.hpp"
#include "tdas/transforms.hpp"

namespace tdas {

// Radial piecewise-constant spectral mask parameters. Radii are fractions of
// the grid extent: a cell (h, w) is measured by
//   DCT: d0 = (h/H)^2 + (w/W)^2
//   DFT: d0 = min over the four spectrum corners of the same normalized form
// and lands in zone 1 (gain 1) when d0 <= 2 r1^2, zone 2 (lambda1) when
// 2 r1^2 < d0 <= 2 r2^2, zone 3 (lambda2) beyond. With zones == 2 the mask
// is the single-threshold form: lambda1 outside r1, r2 / lambda2 ignored.
struct FreqFilterParams {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double r1 = 1.0;
  double r2 = 1.0;
  TransformKind transform = TransformKind::DCT;
  int zones = 3;

  // Throws DomainError on non-positive gains, r1 <= 0, r1 > r2 or zones not in {2, 3}.
  void validate() const;
  bool is_identity() const noexcept;

  nlohmann::json to_json() const;
  static FreqFilterParams from_json(const nlohmann::json& doc);

  friend bool operator==(const FreqFilterParams&, const FreqFilterParams&) = default;
};

// Normalized squared distance of frequency cell (h, w) from DC.
double normalized_distance(std::size_t h, std::size_t w, std::size_t height, std::size_t width,
                           TransformKind kind) noexcept;

// Channel-uniform C x H x W mask.
Tensor build_freq_mask(const FreqFilterParams& p, Shape shape);

// Per-pixel multiplicative mask applied before the frequency stage.
class SpaceFilter {
 public:
  explicit SpaceFilter(Tensor mask);

  const Tensor& mask() const noexcept { return mask_; }
  const Shape& shape() const noexcept { return mask_.shape(); }
  bool is_identity() const noexcept { return identity_; }

 private:
  Tensor mask_;
  bool identity_;
};

SpaceFilter identity_space_mask(Shape shape);

// raw = log(1 + mean_i |x_i|) per (c, h, w), returned as (2 raw / max(raw) + 1) / 3,
// so every entry lies in [1/3, 1]. Throws DegenerateError for an all-zero dataset.
SpaceFilter build_space_mask(const ImageDataset& ds);

// eta = D^-1[freq . D[space . z]] (DCT), or Re(F^-1[freq . F[space . z]]) (DFT).
// An all-ones frequency mask skips the transforms, so identity masks return z exactly.
Tensor apply_tdas(const Tensor& z, const SpaceFilter& space, const Tensor& freq, TransformKind kind);

// Space mask, frequency mask and transform bundled for the samplers.
class TdasFilter {
 public:
  TdasFilter(SpaceFilter space, Tensor freq, TransformKind kind);
  static TdasFilter identity(Shape shape, TransformKind kind = TransformKind::DCT);

  Tensor apply(const Tensor& z) const;

  const SpaceFilter& space() const noexcept { return space_; }
  const Tensor& freq() const noexcept { return freq_; }
  TransformKind kind() const noexcept { return kind_; }
  const Shape& shape() const noexcept { return freq_.shape(); }
  bool is_identity() const noexcept { return space_.is_identity() && freq_identity_; }

 private:
  SpaceFilter space_;
  Tensor freq_;
  TransformKind kind_;
  bool freq_identity_;
};

}  // namespace tdas

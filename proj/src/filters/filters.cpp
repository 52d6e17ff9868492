#include "tdas/filters.hpp"

#include <algorithm>
#include <cmath>

#include "tdas/error.hpp"

namespace tdas {

void FreqFilterParams::validate() const {
  if (zones != 2 && zones != 3) throw DomainError("zones must be 2 or 3");
  if (!(std::isfinite(lambda1) && lambda1 > 0.0)) throw DomainError("lambda1 must be positive");
  if (!(r1 > 0.0) || !std::isfinite(r1)) throw DomainError("r1 must be positive");
  if (zones == 3) {
    if (!(std::isfinite(lambda2) && lambda2 > 0.0)) throw DomainError("lambda2 must be positive");
    if (!(r2 >= r1) || !std::isfinite(r2)) throw DomainError("r2 must satisfy r2 >= r1");
  }
}

bool FreqFilterParams::is_identity() const noexcept {
  return lambda1 == 1.0 && (zones == 2 || lambda2 == 1.0);
}

nlohmann::json FreqFilterParams::to_json() const {
  return {{"lambda1", lambda1}, {"lambda2", lambda2}, {"r1", r1},
          {"r2", r2},           {"transform", to_string(transform)}, {"zones", zones}};
}

FreqFilterParams FreqFilterParams::from_json(const nlohmann::json& doc) {
  FreqFilterParams p;
  try {
    p.lambda1 = doc.at("lambda1").get<double>();
    p.lambda2 = doc.value("lambda2", p.lambda1);
    p.r1 = doc.at("r1").get<double>();
    p.r2 = doc.value("r2", p.r1);
    p.transform = parse_transform(doc.value("transform", std::string("dct")));
    p.zones = doc.value("zones", 3);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("filter parameters: ") + e.what());
  }
  p.validate();
  return p;
}

double normalized_distance(std::size_t h, std::size_t w, std::size_t height, std::size_t width,
                           TransformKind kind) noexcept {
  const double H = static_cast<double>(height), W = static_cast<double>(width);
  double dh = static_cast<double>(h) / H;
  double dw = static_cast<double>(w) / W;
  if (kind == TransformKind::DFT) {
    // Nearest of the four corners: the DFT spectrum of a real image is point-symmetric.
    dh = std::min(dh, static_cast<double>(height - h) / H);
    dw = std::min(dw, static_cast<double>(width - w) / W);
  }
  return dh * dh + dw * dw;
}

Tensor build_freq_mask(const FreqFilterParams& p, Shape shape) {
  p.validate();
  require_valid(shape);
  const double lambda2 = p.zones == 2 ? p.lambda1 : p.lambda2;
  const double t1 = 2.0 * p.r1 * p.r1;
  const double t2 = p.zones == 2 ? t1 : 2.0 * p.r2 * p.r2;
  Tensor mask(shape);
  for (std::size_t h = 0; h < shape.height; ++h)
    for (std::size_t w = 0; w < shape.width; ++w) {
      const double d0 = normalized_distance(h, w, shape.height, shape.width, p.transform);
      const double gain = d0 <= t1 ? 1.0 : (d0 <= t2 ? p.lambda1 : lambda2);
      for (std::size_t c = 0; c < shape.channels; ++c) mask(c, h, w) = gain;
    }
  return mask;
}

SpaceFilter::SpaceFilter(Tensor mask) : mask_(std::move(mask)), identity_(mask_.all_equal(1.0)) {
  require_valid(mask_.shape());
  if (!mask_.all_finite()) throw DomainError("space mask must be finite");
}

SpaceFilter identity_space_mask(Shape shape) { return SpaceFilter(Tensor::ones(shape)); }

SpaceFilter build_space_mask(const ImageDataset& ds) {
  Tensor raw(ds.shape());
  for (const Tensor& x : ds)
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += std::abs(x[i]);
  const double inv_n = 1.0 / static_cast<double>(ds.size());
  double peak = 0.0;
  for (double& v : raw.values()) {
    v = std::log1p(v * inv_n);
    peak = std::max(peak, v);
  }
  if (!(peak > 0.0)) throw DegenerateError("space mask: dataset is all zeros");
  for (double& v : raw.values()) v = (2.0 * v / peak + 1.0) / 3.0;
  return SpaceFilter(std::move(raw));
}

Tensor apply_tdas(const Tensor& z, const SpaceFilter& space, const Tensor& freq, TransformKind kind) {
  require_same(z.shape(), space.shape(), "apply_tdas space mask");
  require_same(z.shape(), freq.shape(), "apply_tdas frequency mask");
  if (freq.all_equal(1.0)) return space.is_identity() ? z : hadamard(space.mask(), z);
  return spectral_filter(z, space.is_identity() ? nullptr : &space.mask(), freq, kind);
}

TdasFilter::TdasFilter(SpaceFilter space, Tensor freq, TransformKind kind)
    : space_(std::move(space)), freq_(std::move(freq)), kind_(kind), freq_identity_(freq_.all_equal(1.0)) {
  require_same(space_.shape(), freq_.shape(), "TdasFilter");
  if (!freq_.all_finite()) throw DomainError("frequency mask must be finite");
}

TdasFilter TdasFilter::identity(Shape shape, TransformKind kind) {
  return TdasFilter(identity_space_mask(shape), Tensor::ones(shape), kind);
}

Tensor TdasFilter::apply(const Tensor& z) const {
  if (is_identity()) {
    require_same(z.shape(), shape(), "TdasFilter::apply");
    return z;
  }
  return apply_tdas(z, space_, freq_, kind_);
}

}  // namespace tdas

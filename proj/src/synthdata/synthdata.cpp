#include "tdas/synthdata.hpp"

#include <cmath>

#include "tdas/error.hpp"
#include "tdas/noise.hpp"
#include "tdas/transforms.hpp"

namespace tdas {

namespace {

constexpr double kTemplateInside = 0.75;
constexpr double kTemplateOutside = 0.15;
// Relative amplitude of the perturbation riding on the face template.
constexpr double kFacePerturbation = 0.4;

// DCT-domain standard deviation of coefficient (h, w) before global scaling.
double spectral_std(std::size_t h, std::size_t w, double decay) {
  const double d0 = static_cast<double>(h * h + w * w);
  return std::pow(1.0 + d0, -decay / 4.0);
}

// Random smooth field with zero mean and expected pixel std `amplitude`.
Tensor low_frequency_field(NoiseSource& src, Shape shape, double decay, double amplitude) {
  Tensor coeffs(shape);
  double total_var = 0.0;
  for (std::size_t h = 0; h < shape.height; ++h)
    for (std::size_t w = 0; w < shape.width; ++w)
      if (h != 0 || w != 0) total_var += std::pow(spectral_std(h, w, decay), 2);
  // Orthonormal DCT: mean pixel variance = (sum of coefficient variances) / (H W).
  const double pixel_var = total_var / static_cast<double>(shape.plane());
  const double gain = pixel_var > 0.0 ? amplitude / std::sqrt(pixel_var) : 0.0;
  for (std::size_t c = 0; c < shape.channels; ++c)
    for (std::size_t h = 0; h < shape.height; ++h)
      for (std::size_t w = 0; w < shape.width; ++w) {
        const double z = src.normal();
        coeffs(c, h, w) = (h == 0 && w == 0) ? 0.0 : gain * spectral_std(h, w, decay) * z;
      }
  return idct2(coeffs);
}

}  // namespace

std::string to_string(SynthKind k) {
  switch (k) {
    case SynthKind::LowFreqBlobs: return "low_freq_blobs";
    case SynthKind::FaceLike: return "face_like";
    case SynthKind::Unstructured: return "unstructured";
  }
  return "unknown";
}

SynthKind parse_synth_kind(const std::string& s) {
  if (s == "low_freq_blobs") return SynthKind::LowFreqBlobs;
  if (s == "face_like") return SynthKind::FaceLike;
  if (s == "unstructured") return SynthKind::Unstructured;
  throw DomainError("unknown dataset kind '" + s + "' (expected low_freq_blobs, face_like or unstructured)");
}

void SynthSpec::validate() const {
  if (count == 0) throw DomainError("synthetic dataset: count must be >= 1");
  require_valid(shape);
  if (!(spectral_decay > 0.0)) throw DomainError("synthetic dataset: spectral_decay must be positive");
  if (!(amplitude >= 0.0)) throw DomainError("synthetic dataset: amplitude must be >= 0");
}

nlohmann::json SynthSpec::to_json() const {
  return {{"kind", to_string(kind)},
          {"count", count},
          {"shape", {shape.channels, shape.height, shape.width}},
          {"spectral_decay", spectral_decay},
          {"seed", seed},
          {"amplitude", amplitude}};
}

SynthSpec SynthSpec::from_json(const nlohmann::json& doc) {
  SynthSpec s;
  try {
    s.kind = parse_synth_kind(doc.at("kind").get<std::string>());
    s.count = doc.value("count", s.count);
    if (doc.contains("shape")) {
      const auto& sh = doc.at("shape");
      s.shape = {sh.at(0).get<std::size_t>(), sh.at(1).get<std::size_t>(), sh.at(2).get<std::size_t>()};
    }
    s.spectral_decay = doc.value("spectral_decay", s.spectral_decay);
    s.seed = doc.value("seed", s.seed);
    s.amplitude = doc.value("amplitude", s.amplitude);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("synthetic dataset spec: ") + e.what());
  }
  s.validate();
  return s;
}

Tensor face_template(Shape shape) {
  Tensor t(shape, kTemplateOutside);
  const double ch = 0.5 * static_cast<double>(shape.height - 1);
  const double cw = 0.5 * static_cast<double>(shape.width - 1);
  const double ah = 0.36 * static_cast<double>(shape.height);
  const double aw = 0.28 * static_cast<double>(shape.width);
  for (std::size_t h = 0; h < shape.height; ++h)
    for (std::size_t w = 0; w < shape.width; ++w) {
      const double u = (static_cast<double>(h) - ch) / ah;
      const double v = (static_cast<double>(w) - cw) / aw;
      if (u * u + v * v <= 1.0)
        for (std::size_t c = 0; c < shape.channels; ++c) t(c, h, w) = kTemplateInside;
    }
  return t;
}

ImageDataset generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<Tensor> items;
  items.reserve(spec.count);
  const Tensor tmpl = spec.kind == SynthKind::FaceLike ? face_template(spec.shape) : Tensor();
  for (std::size_t i = 0; i < spec.count; ++i) {
    NoiseSource src(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
    switch (spec.kind) {
      case SynthKind::LowFreqBlobs: {
        Tensor x = low_frequency_field(src, spec.shape, spec.spectral_decay, spec.amplitude);
        for (double& v : x.values()) v += 0.5;
        items.push_back(std::move(x));
        break;
      }
      case SynthKind::FaceLike: {
        const Tensor p = low_frequency_field(src, spec.shape, spec.spectral_decay,
                                             kFacePerturbation * spec.amplitude);
        items.push_back(tmpl + p);
        break;
      }
      case SynthKind::Unstructured: {
        Tensor x(spec.shape);
        for (double& v : x.values()) v = src.uniform();
        items.push_back(std::move(x));
        break;
      }
    }
  }
  return ImageDataset(std::move(items));
}

}  // namespace tdas

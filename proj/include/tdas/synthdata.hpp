#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "tdas/dataset.hpp"
#include "tdas/tensor.hpp"

namespace tdas {

enum class SynthKind {
  // Random DCT spectra with power ~ (1 + h^2 + w^2)^(-p/2): radially averaged
  // power falls off like rho^-p, pixels centred on 0.5.
  LowFreqBlobs,
  // Shared bright-oval-on-dark template plus low-frequency perturbations.
  FaceLike,
  // i.i.d. uniform [0, 1) pixels (flat spectrum apart from DC).
  Unstructured,
};

std::string to_string(SynthKind k);
SynthKind parse_synth_kind(const std::string& s);

struct SynthSpec {
  SynthKind kind = SynthKind::LowFreqBlobs;
  std::size_t count = 100;
  Shape shape{1, 32, 32};
  double spectral_decay = 2.0;
  std::uint64_t seed = 0;
  // Target pixel standard deviation of the random (non-template) component.
  double amplitude = 0.15;

  void validate() const;
  nlohmann::json to_json() const;
  static SynthSpec from_json(const nlohmann::json& doc);
};

// Item i is generated from NoiseSource(derive_seed(seed, i)), so datasets are
// reproducible and every prefix of a larger dataset matches a smaller one.
ImageDataset generate(const SynthSpec& spec);

// The fixed face_like template for a shape: 0.75 inside a centred ellipse, 0.15 outside.
Tensor face_template(Shape shape);

}  // namespace tdas

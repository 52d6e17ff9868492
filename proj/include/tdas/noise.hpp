#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "tdas/tensor.hpp"

namespace tdas {

// Reproducible standard-normal stream.
//
// Uniforms come from std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Each uniform takes the top 53 bits of one engine word, mapped
// to (-1, 1). Normals use the Marsaglia polar method: pairs (u, v) are drawn
// until 0 < s = u^2 + v^2 < 1, then both u*m and v*m are emitted with
// m = sqrt(-2 ln s / s); the second value of the pair is cached. The only
// libm call is std::log (std::sqrt is IEEE-exact), so streams replay
// bit-identically on any platform with a correctly rounded log.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  // Number of normals handed out so far.
  std::uint64_t position() const noexcept { return position_; }

  double normal();
  // Uniform on [0, 1).
  double uniform();
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Tensor draw_normal(NoiseSource& src, Shape shape);

// Stateless 64-bit mix (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;
// Seed for worker / chain `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;
// Seed for a named purpose ("reference", "calibration", ...) under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

}  // namespace tdas

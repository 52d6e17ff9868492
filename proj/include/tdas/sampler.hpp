#pragma once

#include <cstdint>
#include <vector>

#include "tdas/dataset.hpp"
#include "tdas/filters.hpp"
#include "tdas/noise.hpp"
#include "tdas/scores.hpp"
#include "tdas/transforms.hpp"

namespace tdas {

// Annealed Langevin schedule. Level i runs steps_per_level updates with
//   eps_i = accel_factor * eps0 * sigma_i^2 / sigma_L^2
// where sigma_L is the smallest level. Cutting the iteration count by k and
// setting accel_factor = k keeps the summed step size unchanged.
struct SamplerConfig {
  NoiseLevels levels;
  double eps0 = 2e-5;
  double accel_factor = 1.0;
  TransformKind transform = TransformKind::DCT;
  bool record_trajectory = false;
  // Adds sigma_L^2 * score(x, sigma_L) once after the last step.
  bool denoise_final = false;
  // Stop after this many iterations (0 = run the whole schedule).
  std::size_t max_iterations = 0;

  void validate() const;
  std::size_t total_iterations() const noexcept { return levels.total_iterations(); }
  double step_size(std::size_t level) const;
  // Sum of eps_t over all iterations.
  double total_step() const;
};

// Same ladder with `iterations` total steps and the given acceleration factor.
// Throws DomainError unless iterations is a positive multiple of the level count.
SamplerConfig with_iterations(SamplerConfig cfg, std::size_t iterations, double accel_factor);

struct SampleResult {
  Tensor sample;
  // x_T, ..., x_0 when recording (T + 1 states), otherwise empty.
  std::vector<Tensor> trajectory;
};

// Target-distribution-aware sampler: the initial state and every injected
// noise pass through `filter`. Throws DivergenceError naming the step index
// when the state stops being finite.
SampleResult langevin_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src,
                             const TdasFilter& filter);
SampleResult langevin_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src,
                             const SpaceFilter& space, const Tensor& freq);

// Plain annealed Langevin with isotropic noise. Draw order matches langevin_sample.
SampleResult vanilla_langevin_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src);

// The same dynamics run on x~ = F x: the score is evaluated as F[score(F^-1 x~)]
// and the injected noise is F[filter(z)]. Trajectory states are in the
// transformed domain; `sample` is mapped back, F^-1[x~_0].
SampleResult freq_domain_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src,
                                const OrthogonalMap& map, const TdasFilter* filter = nullptr);
SampleResult freq_domain_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src);

// Independent chains; chain i owns NoiseSource(derive_seed(master_seed, i)),
// so the result does not depend on `jobs`. A null filter runs the vanilla loop.
ImageDataset sample_batch(const ScoreModel& model, const SamplerConfig& cfg, const TdasFilter* filter,
                          std::uint64_t master_seed, std::size_t count, std::size_t jobs = 1);

}  // namespace tdas

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "tdas/dataset.hpp"
#include "tdas/noise.hpp"
#include "tdas/sampler.hpp"
#include "tdas/scores.hpp"
#include "tdas/transforms.hpp"

namespace tdas {

// ---- Orthogonal invariance of the sampling loop ----------------------------

struct Theorem1Report {
  std::string map;
  std::size_t steps = 0;
  double max_deviation = 0.0;          // max_t || x~_t - F[x_t] ||_inf
  std::vector<double> per_step;        // deviation at t = T, T-1, ..., T - steps
  nlohmann::json to_json() const;
};

// Runs the spatial loop and its F-conjugated twin on the same noise stream
// for `steps` iterations of cfg's schedule (0 = initialization only).
Theorem1Report check_theorem1(const ScoreModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                              std::size_t steps, const OrthogonalMap& map);
Theorem1Report check_theorem1(const ScoreModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                              std::size_t steps);

// ---- One-step deviation decomposition --------------------------------------

// Produces z_t given the target draw x* (for correlated regimes) and a stream.
using NoiseGenerator = std::function<Tensor(const Tensor& x_star, NoiseSource& src)>;

NoiseGenerator independent_noise();
NoiseGenerator aligned_noise();       // z = x*
NoiseGenerator anti_aligned_noise();  // z = -x*

// Monte-Carlo estimate of E||x* - x_{t-1}||^2 for x_{t-1} = x_t + (eps/2) s(x_t) + sqrt(eps) z
// next to its three-term split
//   c1          = E||x* - x_t - (eps/2) s(x_t)||^2
//   variance    = eps E||z||^2
//   correlation = 2 sqrt(eps) E[x* . z]
// all from the same draws.
struct DeviationReport {
  double lhs = 0.0;
  double c1_term = 0.0;
  double variance_term = 0.0;
  double correlation_term = 0.0;
  std::size_t mc_samples = 0;
  double standard_error = 0.0;  // of lhs
  double residual = 0.0;        // lhs - (c1 + variance - correlation)

  // Per-draw values, kept for paired comparisons across regimes.
  std::vector<double> lhs_draws;
  std::vector<double> correlation_draws;

  bool consistent() const noexcept;  // |residual| <= 4 standard errors
  nlohmann::json to_json() const;
};

// x* draws come from NoiseSource(derive_seed(seed, "target")) and noise from
// NoiseSource(derive_seed(seed, "noise")), so two calls with the same seed
// share their target draws. Throws DomainError for n_mc < 100 or eps <= 0.
DeviationReport check_theorem2(const ScoreModel& model, double sigma, const Tensor& x_t,
                               const NoiseGenerator& noise_gen, double eps, std::size_t n_mc,
                               std::uint64_t seed);

struct PairedEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// mean over draws of (a.lhs_i - b.lhs_i - b.correlation_i); zero in expectation when
// b's noise is target-aligned and a's is independent with matching variance.
PairedEstimate aligned_gap_residual(const DeviationReport& independent, const DeviationReport& aligned);

// ---- Sample-quality metrics -------------------------------------------------

// mean over (h, w) of |log phi_samples - log phi_reference|.
// Throws DegenerateError when either power grid has a non-positive cell.
double spectral_deviation(const ImageDataset& samples, const ImageDataset& reference, TransformKind transform);

// 1D Wasserstein-2 distance between two empirical distributions (any sizes).
double wasserstein2_1d(std::span<const double> a, std::span<const double> b);

// Mean over projections of the 1D W2 distance of the projected sets.
double sliced_wasserstein(const ImageDataset& a, const ImageDataset& b, std::span<const Tensor> directions);
// Directions drawn uniformly on the unit sphere from `seed`.
double sliced_wasserstein(const ImageDataset& a, const ImageDataset& b, std::size_t n_projections,
                          std::uint64_t seed);

// Neumaier-compensated running sum; reduction order changes move results by O(ulp).
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace tdas

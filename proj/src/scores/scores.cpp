#include "tdas/scores.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tdas/error.hpp"
#include "tdas/simd.hpp"

namespace tdas {

namespace {
constexpr double kFlushLogRatio = -700.0;
}

GaussianScore::GaussianScore(Tensor mu, double s0) : mu_(std::move(mu)), s0_(s0) {
  require_valid(mu_.shape());
  if (!(s0 >= 0.0) || !std::isfinite(s0)) throw DomainError("gaussian score: s0 must be >= 0");
}

Tensor GaussianScore::score(const Tensor& x, double sigma) const {
  require_same(x.shape(), mu_.shape(), "gaussian score");
  const double var = s0_ * s0_ + sigma * sigma;
  if (!(var > 0.0)) throw DomainError("gaussian score: s0 and sigma are both zero");
  Tensor out(x.shape());
  const auto& k = simd::active();
  k.subtract(mu_.data(), x.data(), out.data(), out.size());
  k.scale(1.0 / var, out.data(), out.data(), out.size());
  return out;
}

double GaussianScore::log_density(const Tensor& x, double sigma) const {
  require_same(x.shape(), mu_.shape(), "gaussian log density");
  const double var = s0_ * s0_ + sigma * sigma;
  const double d = static_cast<double>(x.size());
  const double sq = simd::active().squared_distance(x.data(), mu_.data(), x.size());
  return -0.5 * sq / var - 0.5 * d * std::log(2.0 * std::numbers::pi * var);
}

Tensor GaussianScore::sample_target(NoiseSource& src) const {
  Tensor z = draw_normal(src, mu_.shape());
  simd::active().scale(s0_, z.data(), z.data(), z.size());
  return mu_ + z;
}

EmpiricalScore::EmpiricalScore(ImageDataset data) : data_(std::move(data)) {}

Tensor EmpiricalScore::score(const Tensor& x, double sigma) const {
  if (!(sigma > 0.0)) throw DomainError("empirical score needs sigma > 0 (the clean density is atomic)");
  require_same(x.shape(), data_.shape(), "empirical score");
  const auto& k = simd::active();
  const std::size_t n = data_.size(), d = x.size();
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);

  std::vector<double> logits(n);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    logits[i] = -k.squared_distance(x.data(), data_[i].data(), d) * inv_two_var;
    best = std::max(best, logits[i]);
  }
  Tensor acc(x.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rel = logits[i] - best;
    if (rel < kFlushLogRatio) continue;
    const double w = std::exp(rel);
    total += w;
    k.axpy(w, data_[i].data(), acc.data(), d);
  }
  // score = (sum_i w_i x_i / sum_i w_i - x) / sigma^2
  const double inv_var = 1.0 / (sigma * sigma);
  k.scale(1.0 / total, acc.data(), acc.data(), d);
  k.subtract(acc.data(), x.data(), acc.data(), d);
  k.scale(inv_var, acc.data(), acc.data(), d);
  return acc;
}

double EmpiricalScore::log_density(const Tensor& x, double sigma) const {
  if (!(sigma > 0.0)) throw DomainError("empirical log density needs sigma > 0");
  require_same(x.shape(), data_.shape(), "empirical log density");
  const auto& k = simd::active();
  const std::size_t n = data_.size(), d = x.size();
  std::vector<double> logits(n);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    logits[i] = -k.squared_distance(x.data(), data_[i].data(), d) / (2.0 * sigma * sigma);
    best = std::max(best, logits[i]);
  }
  double total = 0.0;
  for (double l : logits) total += std::exp(l - best);
  return best + std::log(total) - std::log(static_cast<double>(n)) -
         0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * sigma * sigma);
}

Tensor EmpiricalScore::sample_target(NoiseSource& src) const {
  return data_[static_cast<std::size_t>(src.next_u64() % data_.size())];
}

NoiseLevels geometric_levels(double sigma_max, double sigma_min, std::size_t levels,
                             std::size_t steps_per_level) {
  if (levels == 0) throw DomainError("noise levels: need at least one level");
  if (steps_per_level == 0) throw DomainError("noise levels: need at least one step per level");
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_max))
    throw DomainError("noise levels: sigmas must be positive and finite");
  if (levels > 1 && !(sigma_max > sigma_min))
    throw DomainError("noise levels: sigma_max must exceed sigma_min");
  NoiseLevels out;
  out.steps_per_level = steps_per_level;
  out.sigmas.resize(levels);
  if (levels == 1) {
    out.sigmas[0] = sigma_max;
    return out;
  }
  const double ratio = sigma_min / sigma_max;
  for (std::size_t i = 0; i < levels; ++i)
    out.sigmas[i] = sigma_max * std::pow(ratio, static_cast<double>(i) / static_cast<double>(levels - 1));
  out.sigmas.back() = sigma_min;
  return out;
}

}  // namespace tdas

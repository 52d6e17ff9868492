#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "tdas/dataset.hpp"
#include "tdas/noise.hpp"
#include "tdas/tensor.hpp"

namespace tdas {

// Exact score of a noise-conditional density p_sigma.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  virtual Shape shape() const = 0;
  // grad_x log p_sigma(x); same shape as x, finite.
  virtual Tensor score(const Tensor& x, double sigma) const = 0;
  // log p_sigma(x), used by finite-difference checks.
  virtual double log_density(const Tensor& x, double sigma) const = 0;
  // One draw from the clean target p (sigma = 0).
  virtual Tensor sample_target(NoiseSource& src) const = 0;
};

// Target N(mu, s0^2 I); smoothed density N(mu, (s0^2 + sigma^2) I).
class GaussianScore final : public ScoreModel {
 public:
  GaussianScore(Tensor mu, double s0);

  Shape shape() const override { return mu_.shape(); }
  Tensor score(const Tensor& x, double sigma) const override;
  double log_density(const Tensor& x, double sigma) const override;
  Tensor sample_target(NoiseSource& src) const override;

  const Tensor& mean() const noexcept { return mu_; }
  double s0() const noexcept { return s0_; }

 private:
  Tensor mu_;
  double s0_;
};

// Gaussian-smoothed empirical distribution (1/N) sum_i N(x; x_i, sigma^2 I).
// Mixture weights are a log-sum-exp stabilised softmax; components more than
// 700 nats below the best are dropped.
class EmpiricalScore final : public ScoreModel {
 public:
  explicit EmpiricalScore(ImageDataset data);

  Shape shape() const override { return data_.shape(); }
  // Throws DomainError for sigma <= 0.
  Tensor score(const Tensor& x, double sigma) const override;
  double log_density(const Tensor& x, double sigma) const override;
  // A uniformly chosen dataset item.
  Tensor sample_target(NoiseSource& src) const override;

  const ImageDataset& data() const noexcept { return data_; }

 private:
  ImageDataset data_;
};

// Flat (improper) density: the score is identically zero.
class ZeroScore final : public ScoreModel {
 public:
  explicit ZeroScore(Shape shape) : shape_(shape) {}

  Shape shape() const override { return shape_; }
  Tensor score(const Tensor& x, double) const override { return Tensor(x.shape()); }
  double log_density(const Tensor&, double) const override { return 0.0; }
  Tensor sample_target(NoiseSource& src) const override { return draw_normal(src, shape_); }

 private:
  Shape shape_;
};

// Strictly decreasing noise ladder sigma_1 > ... > sigma_L.
struct NoiseLevels {
  std::vector<double> sigmas;
  std::size_t steps_per_level = 1;

  std::size_t levels() const noexcept { return sigmas.size(); }
  std::size_t total_iterations() const noexcept { return sigmas.size() * steps_per_level; }
  double smallest() const noexcept { return sigmas.back(); }
};

// sigma_i = sigma_max (sigma_min / sigma_max)^((i - 1) / (L - 1)); L = 1 gives {sigma_max}.
NoiseLevels geometric_levels(double sigma_max, double sigma_min, std::size_t levels,
                             std::size_t steps_per_level);

}  // namespace tdas

#include "tdas/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "tdas/error.hpp"
#include "tdas/simd.hpp"

namespace tdas {

void SamplerConfig::validate() const {
  if (levels.sigmas.empty()) throw DomainError("sampler: no noise levels");
  if (levels.steps_per_level == 0) throw DomainError("sampler: steps_per_level must be >= 1");
  for (std::size_t i = 0; i < levels.sigmas.size(); ++i) {
    if (!(levels.sigmas[i] > 0.0)) throw DomainError("sampler: sigmas must be positive");
    if (i > 0 && !(levels.sigmas[i] < levels.sigmas[i - 1]))
      throw DomainError("sampler: sigmas must be strictly decreasing");
  }
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw DomainError("sampler: eps0 must be positive");
  if (!(accel_factor > 0.0) || !std::isfinite(accel_factor))
    throw DomainError("sampler: accel_factor must be positive");
}

double SamplerConfig::step_size(std::size_t level) const {
  const double ratio = levels.sigmas[level] / levels.smallest();
  return accel_factor * eps0 * ratio * ratio;
}

double SamplerConfig::total_step() const {
  double total = 0.0;
  for (std::size_t i = 0; i < levels.levels(); ++i)
    total += step_size(i) * static_cast<double>(levels.steps_per_level);
  return total;
}

SamplerConfig with_iterations(SamplerConfig cfg, std::size_t iterations, double accel_factor) {
  const std::size_t l = cfg.levels.levels();
  if (l == 0 || iterations == 0 || iterations % l != 0)
    throw DomainError("iterations (" + std::to_string(iterations) + ") must be a positive multiple of the " +
                      std::to_string(l) + " noise levels");
  cfg.levels.steps_per_level = iterations / l;
  cfg.accel_factor = accel_factor;
  return cfg;
}

namespace {

// Shared driver. `next_noise` yields the injected noise and `score_at` the
// score, both expressed in whatever domain x lives in.
template <class Noise, class Score>
SampleResult run_chain(const SamplerConfig& cfg, NoiseSource& src, Tensor x,
                       Noise&& next_noise, Score&& score_at, const char* where) {
  cfg.validate();
  const auto& k = simd::active();
  const std::size_t limit =
      cfg.max_iterations == 0 ? cfg.total_iterations() : std::min(cfg.max_iterations, cfg.total_iterations());
  SampleResult out;
  if (cfg.record_trajectory) {
    out.trajectory.reserve(limit + 1);
    out.trajectory.push_back(x);
  }
  if (!x.all_finite()) throw DivergenceError(0, where);
  std::size_t step = 0;
  for (std::size_t level = 0; level < cfg.levels.levels() && step < limit; ++level) {
    const double sigma = cfg.levels.sigmas[level];
    const double eps = cfg.step_size(level);
    const double half_eps = 0.5 * eps;
    const double sqrt_eps = std::sqrt(eps);
    for (std::size_t s = 0; s < cfg.levels.steps_per_level && step < limit; ++s) {
      ++step;
      const Tensor noise = next_noise(src);
      const Tensor grad = score_at(x, sigma);
      k.langevin_step(x.data(), grad.data(), noise.data(), half_eps, sqrt_eps, x.size());
      if (!k.all_finite(x.data(), x.size())) throw DivergenceError(step, where);
      if (cfg.record_trajectory) out.trajectory.push_back(x);
    }
  }
  if (cfg.denoise_final) {
    const double sl = cfg.levels.smallest();
    const Tensor grad = score_at(x, sl);
    k.axpy(sl * sl, grad.data(), x.data(), x.size());
    if (!k.all_finite(x.data(), x.size())) throw DivergenceError(step + 1, where);
  }
  out.sample = std::move(x);
  return out;
}

}  // namespace

SampleResult langevin_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src,
                             const TdasFilter& filter) {
  const Shape shape = model.shape();
  require_same(shape, filter.shape(), "langevin_sample filter");
  Tensor x = filter.apply(draw_normal(src, shape));
  return run_chain(
      cfg, src, std::move(x),
      [&](NoiseSource& s) { return filter.apply(draw_normal(s, shape)); },
      [&](const Tensor& state, double sigma) { return model.score(state, sigma); }, "langevin_sample");
}

SampleResult langevin_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src,
                             const SpaceFilter& space, const Tensor& freq) {
  return langevin_sample(model, cfg, src, TdasFilter(space, freq, cfg.transform));
}

SampleResult vanilla_langevin_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src) {
  const Shape shape = model.shape();
  Tensor x = draw_normal(src, shape);
  return run_chain(
      cfg, src, std::move(x), [&](NoiseSource& s) { return draw_normal(s, shape); },
      [&](const Tensor& state, double sigma) { return model.score(state, sigma); }, "vanilla_langevin_sample");
}

SampleResult freq_domain_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src,
                                const OrthogonalMap& map, const TdasFilter* filter) {
  const Shape shape = model.shape();
  auto spatial_noise = [&](NoiseSource& s) {
    Tensor z = draw_normal(s, shape);
    return filter != nullptr ? filter->apply(z) : z;
  };
  Tensor x = map.forward(spatial_noise(src));
  SampleResult r = run_chain(
      cfg, src, std::move(x), [&](NoiseSource& s) { return map.forward(spatial_noise(s)); },
      [&](const Tensor& state, double sigma) { return map.forward(model.score(map.inverse(state), sigma)); },
      "freq_domain_sample");
  r.sample = map.inverse(r.sample);
  return r;
}

SampleResult freq_domain_sample(const ScoreModel& model, const SamplerConfig& cfg, NoiseSource& src) {
  return freq_domain_sample(model, cfg, src, DctMap{});
}

ImageDataset sample_batch(const ScoreModel& model, const SamplerConfig& cfg, const TdasFilter* filter,
                          std::uint64_t master_seed, std::size_t count, std::size_t jobs) {
  if (count == 0) throw DomainError("sample_batch: count must be >= 1");
  cfg.validate();
  SamplerConfig chain_cfg = cfg;
  chain_cfg.record_trajectory = false;
  std::vector<Tensor> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        NoiseSource src(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
        out[i] = filter != nullptr ? langevin_sample(model, chain_cfg, src, *filter).sample
                                   : vanilla_langevin_sample(model, chain_cfg, src).sample;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, count);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return ImageDataset(std::move(out));
}

}  // namespace tdas

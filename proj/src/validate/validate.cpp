#include "tdas/validate.hpp"

#include <algorithm>
#include <cmath>

#include "tdas/calib.hpp"
#include "tdas/error.hpp"
#include "tdas/simd.hpp"

namespace tdas {

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

namespace {

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_and_se(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double n = static_cast<double>(v.size());
  const double mean = s.value() / n;
  CompensatedSum sq;
  for (double x : v) sq.add((x - mean) * (x - mean));
  const double var = v.size() > 1 ? sq.value() / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double max_abs(const Tensor& a, const Tensor& b) { return max_abs_diff(a, b); }

}  // namespace

nlohmann::json Theorem1Report::to_json() const {
  return {{"harness", "theorem1"}, {"map", map}, {"steps", steps}, {"max_deviation", max_deviation}};
}

Theorem1Report check_theorem1(const ScoreModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                              std::size_t steps, const OrthogonalMap& map) {
  if (steps > cfg.total_iterations())
    throw DomainError("check_theorem1: steps exceed the schedule length");
  SamplerConfig run = cfg;
  run.record_trajectory = true;
  run.denoise_final = false;
  run.max_iterations = steps;

  Theorem1Report report;
  report.map = map.name();
  report.steps = steps;
  if (steps == 0) {
    // Initialization only: x~_T = F[z_T] against F applied to the spatial x_T.
    NoiseSource a(seed), b(seed);
    const Tensor x = draw_normal(a, model.shape());
    const Tensor xt = map.forward(draw_normal(b, model.shape()));
    report.max_deviation = max_abs(xt, map.forward(x));
    report.per_step = {report.max_deviation};
    return report;
  }
  NoiseSource spatial_src(seed), freq_src(seed);
  const SampleResult spatial = vanilla_langevin_sample(model, run, spatial_src);
  const SampleResult freq = freq_domain_sample(model, run, freq_src, map);
  for (std::size_t t = 0; t < spatial.trajectory.size(); ++t) {
    const double d = max_abs(freq.trajectory[t], map.forward(spatial.trajectory[t]));
    report.per_step.push_back(d);
    report.max_deviation = std::max(report.max_deviation, d);
  }
  return report;
}

Theorem1Report check_theorem1(const ScoreModel& model, const SamplerConfig& cfg, std::uint64_t seed,
                              std::size_t steps) {
  return check_theorem1(model, cfg, seed, steps, DctMap{});
}

NoiseGenerator independent_noise() {
  return [](const Tensor& x_star, NoiseSource& src) { return draw_normal(src, x_star.shape()); };
}

NoiseGenerator aligned_noise() {
  return [](const Tensor& x_star, NoiseSource&) { return x_star; };
}

NoiseGenerator anti_aligned_noise() {
  return [](const Tensor& x_star, NoiseSource&) { return -1.0 * x_star; };
}

bool DeviationReport::consistent() const noexcept {
  // An exactly zero standard error still admits round-off in the residual.
  const double band = 4.0 * standard_error + 1e-9 * std::max(1.0, std::abs(lhs));
  return std::abs(residual) <= band;
}

nlohmann::json DeviationReport::to_json() const {
  return {{"harness", "theorem2"},
          {"lhs", lhs},
          {"c1_term", c1_term},
          {"variance_term", variance_term},
          {"correlation_term", correlation_term},
          {"residual", residual},
          {"standard_error", standard_error},
          {"mc_samples", mc_samples},
          {"consistent", consistent()}};
}

DeviationReport check_theorem2(const ScoreModel& model, double sigma, const Tensor& x_t,
                               const NoiseGenerator& noise_gen, double eps, std::size_t n_mc,
                               std::uint64_t seed) {
  if (n_mc < 100) throw DomainError("check_theorem2: need at least 100 Monte-Carlo draws");
  if (!(eps > 0.0)) throw DomainError("check_theorem2: eps must be positive");
  require_same(x_t.shape(), model.shape(), "check_theorem2");

  const auto& k = simd::active();
  const double sqrt_eps = std::sqrt(eps);
  // m = x_t + (eps/2) s(x_t): the noise-free part of the update.
  Tensor drift = x_t;
  const Tensor s = model.score(x_t, sigma);
  k.axpy(0.5 * eps, s.data(), drift.data(), drift.size());

  NoiseSource target_src(derive_seed(seed, "target"));
  NoiseSource noise_src(derive_seed(seed, "noise"));
  DeviationReport r;
  r.mc_samples = n_mc;
  r.lhs_draws.reserve(n_mc);
  r.correlation_draws.reserve(n_mc);
  CompensatedSum c1, var, corr;
  Tensor next(x_t.shape());
  for (std::size_t i = 0; i < n_mc; ++i) {
    const Tensor x_star = model.sample_target(target_src);
    const Tensor z = noise_gen(x_star, noise_src);
    require_same(z.shape(), x_t.shape(), "check_theorem2 noise");
    next = drift;
    k.axpy(sqrt_eps, z.data(), next.data(), next.size());
    r.lhs_draws.push_back(k.squared_distance(x_star.data(), next.data(), next.size()));
    c1.add(k.squared_distance(x_star.data(), drift.data(), drift.size()));
    var.add(eps * k.dot(z.data(), z.data(), z.size()));
    const double cd = 2.0 * sqrt_eps * k.dot(x_star.data(), z.data(), z.size());
    r.correlation_draws.push_back(cd);
    corr.add(cd);
  }
  const double n = static_cast<double>(n_mc);
  const MeanSe lhs = mean_and_se(r.lhs_draws);
  r.lhs = lhs.mean;
  r.standard_error = lhs.se;
  r.c1_term = c1.value() / n;
  r.variance_term = var.value() / n;
  r.correlation_term = corr.value() / n;
  r.residual = r.lhs - (r.c1_term + r.variance_term - r.correlation_term);
  return r;
}

PairedEstimate aligned_gap_residual(const DeviationReport& independent, const DeviationReport& aligned) {
  if (independent.lhs_draws.size() != aligned.lhs_draws.size())
    throw DomainError("aligned_gap_residual: reports use different draw counts");
  std::vector<double> d(independent.lhs_draws.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = independent.lhs_draws[i] - aligned.lhs_draws[i] - aligned.correlation_draws[i];
  const MeanSe m = mean_and_se(d);
  return {m.mean, m.se};
}

double spectral_deviation(const ImageDataset& samples, const ImageDataset& reference, TransformKind transform) {
  require_same(samples.shape(), reference.shape(), "spectral_deviation");
  const FreqStats a = freq_power_stats(samples, transform);
  const FreqStats b = freq_power_stats(reference, transform);
  CompensatedSum total;
  for (std::size_t i = 0; i < a.power.size(); ++i) {
    if (!(a.power[i] > 0.0) || !(b.power[i] > 0.0))
      throw DegenerateError("spectral_deviation: zero spectral power in a frequency cell");
    total.add(std::abs(std::log(a.power[i]) - std::log(b.power[i])));
  }
  return total.value() / static_cast<double>(a.power.size());
}

double wasserstein2_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DegenerateError("wasserstein2_1d: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  // Integrate (F^-1(u) - G^-1(u))^2 over u in [0, 1]; both quantile functions are step functions.
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double u = 0.0;
  CompensatedSum acc;
  while (i < x.size() && j < y.size()) {
    const double next_i = static_cast<double>(i + 1) / n;
    const double next_j = static_cast<double>(j + 1) / m;
    const double upto = std::min(next_i, next_j);
    const double d = x[i] - y[j];
    acc.add((upto - u) * d * d);
    u = upto;
    if (next_i <= upto) ++i;
    if (next_j <= upto) ++j;
  }
  return std::sqrt(std::max(0.0, acc.value()));
}

double sliced_wasserstein(const ImageDataset& a, const ImageDataset& b, std::span<const Tensor> directions) {
  require_same(a.shape(), b.shape(), "sliced_wasserstein");
  if (directions.empty()) throw DomainError("sliced_wasserstein: need at least one projection");
  const auto& k = simd::active();
  std::vector<double> pa(a.size()), pb(b.size());
  CompensatedSum total;
  for (const Tensor& dir : directions) {
    require_same(dir.shape(), a.shape(), "sliced_wasserstein direction");
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] = k.dot(a[i].data(), dir.data(), dir.size());
    for (std::size_t i = 0; i < b.size(); ++i) pb[i] = k.dot(b[i].data(), dir.data(), dir.size());
    total.add(wasserstein2_1d(pa, pb));
  }
  return total.value() / static_cast<double>(directions.size());
}

double sliced_wasserstein(const ImageDataset& a, const ImageDataset& b, std::size_t n_projections,
                          std::uint64_t seed) {
  if (n_projections == 0) throw DomainError("sliced_wasserstein: need at least one projection");
  NoiseSource src(seed);
  std::vector<Tensor> dirs;
  dirs.reserve(n_projections);
  for (std::size_t p = 0; p < n_projections; ++p) {
    Tensor d = draw_normal(src, a.shape());
    const double len = norm(d);
    dirs.push_back((1.0 / len) * d);
  }
  return sliced_wasserstein(a, b, dirs);
}

}  // namespace tdas

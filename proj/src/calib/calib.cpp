#include "tdas/calib.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdas/simd.hpp"

namespace tdas {

FreqStats freq_power_stats(const ImageDataset& samples, TransformKind transform) {
  const Shape s = samples.shape();
  Tensor power({1, s.height, s.width});
  const std::size_t plane = s.plane();
  auto accumulate = [&](std::span<const double> re, std::span<const double> im) {
    for (std::size_t i = 0; i < plane; ++i) power[i] += re[i] * re[i] + (im.empty() ? 0.0 : im[i] * im[i]);
  };
  for (const Tensor& x : samples) {
    if (transform == TransformKind::DCT) {
      const Tensor d = dct2(x);
      for (std::size_t c = 0; c < s.channels; ++c) accumulate(d.channel(c), {});
    } else {
      const SpectrumGrid f = dft2(x);
      for (std::size_t c = 0; c < s.channels; ++c) accumulate(f.re.channel(c), f.im.channel(c));
    }
  }
  const double inv = 1.0 / static_cast<double>(samples.size() * s.channels);
  simd::active().scale(inv, power.data(), power.data(), power.size());
  return {std::move(power), transform, samples.size()};
}

RatioGrid ratio_grid(const FreqStats& generated, const FreqStats& reference, double floor) {
  require_same(generated.power.shape(), reference.power.shape(), "ratio_grid");
  if (generated.transform != reference.transform)
    throw DomainError("ratio_grid: statistics computed with different transforms");
  if (!(floor > 0.0)) throw DomainError("ratio_grid: floor must be positive");
  RatioGrid g{Tensor(reference.power.shape()), reference.transform, 0, floor};
  for (std::size_t i = 0; i < g.gamma.size(); ++i) {
    double denom = reference.power[i];
    if (denom < floor) {
      denom = floor;
      ++g.clamped_cells;
    }
    g.gamma[i] = generated.power[i] / denom;
  }
  return g;
}

double quantile(std::span<const double> values, double alpha) {
  if (values.empty()) throw DegenerateError("quantile of an empty set");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("quantile: alpha must lie in (0, 1]");
  // Smallest k with k >= alpha * n; the answer is the k-th smallest element.
  const double need = alpha * static_cast<double>(values.size());
  std::size_t k = static_cast<std::size_t>(std::ceil(need));
  k = std::clamp<std::size_t>(k, 1, values.size());
  std::vector<double> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

namespace {

double region_mean(const RatioGrid& g, double threshold, TransformKind distance, std::size_t& count) {
  const std::size_t H = g.gamma.height(), W = g.gamma.width();
  double sum = 0.0;
  count = 0;
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t w = 0; w < W; ++w)
      if (normalized_distance(h, w, H, W, distance) >= threshold) {
        sum += g.gamma(0, h, w);
        ++count;
      }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

double kappa(const RatioGrid& g, double r, TransformKind distance) {
  if (!(r >= 0.0)) throw DomainError("kappa: radius must be >= 0");
  std::size_t count = 0;
  const double m = region_mean(g, 2.0 * r * r, distance, count);
  if (count == 0) throw DomainError("kappa: no frequency cell lies outside radius " + std::to_string(r));
  return m;
}

std::vector<KappaPoint> kappa_curve(const RatioGrid& g, TransformKind distance, std::size_t first_index) {
  const std::size_t H = g.gamma.height(), W = g.gamma.width();
  const double step = 1.0 / static_cast<double>(std::max(H, W));
  std::vector<KappaPoint> curve;
  for (std::size_t j = first_index;; ++j) {
    const double r = static_cast<double>(j) * step;
    std::size_t count = 0;
    const double m = region_mean(g, 2.0 * r * r, distance, count);
    if (count == 0) break;
    curve.push_back({r, m});
  }
  return curve;
}

std::string to_string(CalibrationDirection d) { return d == CalibrationDirection::SGM ? "sgm" : "ddpm"; }

CalibrationDirection parse_direction(const std::string& s) {
  if (s == "sgm" || s == "SGM") return CalibrationDirection::SGM;
  if (s == "ddpm" || s == "DDPM") return CalibrationDirection::DDPM;
  throw DomainError("unknown calibration direction '" + s + "' (expected sgm or ddpm)");
}

Calibration calc_freq_params(const RatioGrid& g, CalibrationDirection direction, TransformKind transform) {
  const auto values = g.gamma.values();
  if (values.empty()) throw DegenerateError("calibration: empty ratio grid");
  for (double v : values)
    if (!(std::isfinite(v) && v > 0.0))
      throw DegenerateError("calibration: ratio grid entries must be positive and finite");

  const bool sgm = direction == CalibrationDirection::SGM;
  Calibration out;
  out.average = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  out.q_mid = quantile(values, sgm ? 0.75 : 0.25);
  out.q_high = quantile(values, sgm ? 0.9 : 0.1);
  out.curve = kappa_curve(g, transform, 1);

  auto reached = [sgm](double k, double level) { return sgm ? k >= level : k <= level; };
  auto first_crossing = [&](double level, std::size_t from) -> std::size_t {
    for (std::size_t i = from; i < out.curve.size(); ++i)
      if (reached(out.curve[i].kappa, level)) return i;
    return out.curve.size();
  };

  const std::size_t i1 = first_crossing(out.q_mid, 0);
  if (i1 == out.curve.size())
    throw CalibrationError("calibration: kappa never reaches the middle quantile level " +
                               std::to_string(out.q_mid),
                           out.curve);
  const std::size_t i2 = first_crossing(out.q_high, i1);
  if (i2 == out.curve.size())
    throw CalibrationError("calibration: kappa never reaches the high quantile level " +
                               std::to_string(out.q_high),
                           out.curve);

  out.params.lambda1 = out.average / out.q_mid;
  out.params.lambda2 = out.average / out.q_high;
  out.params.r1 = out.curve[i1].r;
  out.params.r2 = out.curve[i2].r;
  out.params.transform = transform;
  out.params.zones = 3;
  out.params.validate();
  return out;
}

std::vector<RadialBin> radial_profile(const FreqStats& stats) {
  const std::size_t H = stats.power.height(), W = stats.power.width();
  std::vector<RadialBin> bins;
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t w = 0; w < W; ++w) {
      double dh = static_cast<double>(h), dw = static_cast<double>(w);
      if (stats.transform == TransformKind::DFT) {
        dh = std::min(dh, static_cast<double>(H - h));
        dw = std::min(dw, static_cast<double>(W - w));
      }
      const double rho = std::hypot(dh, dw);
      const auto bin = static_cast<std::size_t>(std::floor(rho + 0.5));
      if (bin >= bins.size()) bins.resize(bin + 1);
      bins[bin].radius += rho;
      bins[bin].power += stats.power(0, h, w);
      ++bins[bin].cells;
    }
  std::vector<RadialBin> out;
  for (auto& b : bins) {
    if (b.cells == 0) continue;
    b.radius /= static_cast<double>(b.cells);
    b.power /= static_cast<double>(b.cells);
    out.push_back(b);
  }
  return out;
}

}  // namespace tdas

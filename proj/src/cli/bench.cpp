#include <algorithm>
#include <chrono>

#include "tdas/cli.hpp"
#include "tdas/error.hpp"
#include "tdas/filters.hpp"
#include "tdas/noise.hpp"

namespace tdas::cli {

std::vector<FilterBenchRow> bench_filter_overhead(std::span<const std::size_t> sizes, std::size_t channels,
                                                  std::size_t runs, TransformKind kind, std::uint64_t seed) {
  if (sizes.empty() || runs == 0 || channels == 0) throw DomainError("bench: need sizes, channels and runs >= 1");
  std::vector<FilterBenchRow> rows;
  for (std::size_t size : sizes) {
    const Shape s{channels, size, size};
    require_valid(s);
    NoiseSource src(derive_seed(seed, static_cast<std::uint64_t>(size)));
    const Tensor z = draw_normal(src, s);
    Tensor space_mask(s);
    for (double& v : space_mask.values()) v = 1.0 / 3.0 + 2.0 / 3.0 * src.uniform();
    const SpaceFilter space(space_mask);
    const Tensor freq = build_freq_mask({0.638, 0.540, 0.770, 0.901, kind, 3}, s);

    Tensor sink = apply_tdas(z, space, freq, kind);
    std::vector<double> ms;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      sink = apply_tdas(z, space, freq, kind);
      const auto t1 = std::chrono::steady_clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(ms.begin(), ms.end());
    const std::size_t m = ms.size();
    const double median = m % 2 == 1 ? ms[m / 2] : 0.5 * (ms[m / 2 - 1] + ms[m / 2]);
    rows.push_back({size, channels, runs, median, ms.front(), 1.0});
  }
  for (auto& r : rows) r.ratio = r.median_ms / rows.front().median_ms;
  return rows;
}

}  // namespace tdas::cli

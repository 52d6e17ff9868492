#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tdas/transforms.hpp"

namespace tdas::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kValidationFailed = 2;

// Runs `tdas <args...>` (args excludes the program name) and returns the exit code.
// Every successful command writes <out>/run_manifest.json.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct FilterBenchRow {
  std::size_t size = 0;
  std::size_t channels = 0;
  std::size_t runs = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double ratio = 1.0;  // median relative to the first size
};

// Times apply_tdas on channels x size x size inputs with a non-trivial space
// mask and a three-zone frequency mask. One untimed warm-up call per size.
std::vector<FilterBenchRow> bench_filter_overhead(std::span<const std::size_t> sizes, std::size_t channels,
                                                  std::size_t runs, TransformKind kind, std::uint64_t seed = 0);

}  // namespace tdas::cli

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tdas/dataset.hpp"
#include "tdas/error.hpp"
#include "tdas/filters.hpp"
#include "tdas/tensor.hpp"
#include "tdas/transforms.hpp"

namespace tdas {

// Channel-averaged mean spectral power per frequency cell, stored 1 x H x W.
struct FreqStats {
  Tensor power;
  TransformKind transform = TransformKind::DCT;
  std::size_t sample_count = 0;
};

// power(h, w) = (1/C) mean over samples and channels of |T[x]|^2(c, h, w).
FreqStats freq_power_stats(const ImageDataset& samples, TransformKind transform);

// Ratio of generated to reference spectral power.
struct RatioGrid {
  Tensor gamma;
  TransformKind transform = TransformKind::DCT;
  // Cells whose reference power fell below the floor and were divided by the floor instead.
  std::size_t clamped_cells = 0;
  double floor = 0.0;
};

inline constexpr double kDefaultPowerFloor = 1e-12;

// Throws ShapeError / DomainError when the two statistics are not comparable.
RatioGrid ratio_grid(const FreqStats& generated, const FreqStats& reference,
                     double floor = kDefaultPowerFloor);

// Order-statistic quantile: min { x in S : #{y in S : y <= x} >= alpha #S }.
// Throws DegenerateError on an empty set, DomainError for alpha outside (0, 1].
double quantile(std::span<const double> values, double alpha);

// Mean of gamma over the cells with normalized distance d0 >= 2 r^2.
// Throws DomainError when no cell qualifies.
double kappa(const RatioGrid& g, double r, TransformKind distance);

// kappa on the radial grid r = j / max(H, W), j = first_index, first_index + 1, ...
// up to the last radius whose region is non-empty.
std::vector<KappaPoint> kappa_curve(const RatioGrid& g, TransformKind distance, std::size_t first_index = 0);

enum class CalibrationDirection { SGM, DDPM };

std::string to_string(CalibrationDirection d);
CalibrationDirection parse_direction(const std::string& s);

struct Calibration {
  FreqFilterParams params;
  std::vector<KappaPoint> curve;  // scanned curve, r > 0
  double average = 0.0;
  double q_mid = 0.0;   // Q_0.75 (SGM) or Q_0.25 (DDPM)
  double q_high = 0.0;  // Q_0.9  (SGM) or Q_0.1  (DDPM)
};

// SGM: lambda1 = ave / Q_0.75, lambda2 = ave / Q_0.9; r1 / r2 are the first
// radii (r > 0, ties to the smaller) where kappa reaches Q_0.75 / Q_0.9 from
// below. DDPM uses Q_0.25 / Q_0.1 and the first radii where kappa falls to
// them. r2 is searched from r1 outward. Throws CalibrationError carrying the
// kappa curve when a level is never reached.
Calibration calc_freq_params(const RatioGrid& g, CalibrationDirection direction, TransformKind transform);

struct RadialBin {
  double radius = 0.0;  // mean distance from DC of the cells in the bin, in frequency-index units
  double power = 0.0;   // mean power over the bin
  std::size_t cells = 0;
};

// Power averaged over unit-width rings of the (corner-folded for DFT) index distance.
std::vector<RadialBin> radial_profile(const FreqStats& stats);

}  // namespace tdas

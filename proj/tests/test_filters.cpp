#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tdas/error.hpp"
#include "tdas/filters.hpp"
#include "tdas/noise.hpp"

using namespace tdas;

namespace {

// Zone assignment written out from the definition, independent of the library.
double expected_gain(const FreqFilterParams& p, std::size_t h, std::size_t w, std::size_t H, std::size_t W) {
  auto d = [&](double a, double b) { return (a / H) * (a / H) + (b / W) * (b / W); };
  double d0 = d(h, w);
  if (p.transform == TransformKind::DFT) {
    const double hh = static_cast<double>(H - h), ww = static_cast<double>(W - w);
    d0 = std::min({d(h, w), d(hh, w), d(h, ww), d(hh, ww)});
  }
  if (d0 <= 2 * p.r1 * p.r1) return 1.0;
  if (p.zones == 2 || d0 <= 2 * p.r2 * p.r2) return p.lambda1;
  return p.lambda2;
}

}  // namespace

TEST(FreqMask, IdentityCases) {
  const Shape s{2, 17, 12};
  for (auto kind : {TransformKind::DCT, TransformKind::DFT}) {
    const FreqFilterParams cover{0.3, 0.2, std::sqrt(2.0), std::sqrt(2.0), kind, 3};
    EXPECT_TRUE(build_freq_mask(cover, s).all_equal(1.0));
    const FreqFilterParams unit{1.0, 1.0, 0.05, 0.1, kind, 3};
    EXPECT_TRUE(unit.is_identity());
    EXPECT_TRUE(build_freq_mask(unit, s).all_equal(1.0));
  }
}

TEST(FreqMask, BedroomDctRow) {
  const FreqFilterParams p{0.638, 0.540, 0.770, 0.901, TransformKind::DCT, 3};
  const Tensor m = build_freq_mask(p, {3, 256, 256});
  EXPECT_EQ(m(0, 0, 0), 1.0);
  EXPECT_NEAR(normalized_distance(255, 255, 256, 256, TransformKind::DCT), 1.984, 1e-3);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(m(c, 255, 255), 0.540);
}

TEST(FreqMask, ZonesMatchDefinition) {
  for (auto kind : {TransformKind::DCT, TransformKind::DFT})
    for (int zones : {2, 3}) {
      const FreqFilterParams p{0.7, 0.4, 0.3, 0.55, kind, zones};
      const std::size_t H = 23, W = 16;
      const Tensor m = build_freq_mask(p, {2, H, W});
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t h = 0; h < H; ++h)
          for (std::size_t w = 0; w < W; ++w)
            ASSERT_EQ(m(c, h, w), expected_gain(p, h, w, H, W)) << h << "," << w;
    }
}

TEST(FreqMask, DftMaskIsConjugateSymmetric) {
  const FreqFilterParams p{0.8, 0.3, 0.2, 0.35, TransformKind::DFT, 3};
  const std::size_t H = 15, W = 20;
  const Tensor m = build_freq_mask(p, {1, H, W});
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t w = 0; w < W; ++w) EXPECT_EQ(m(0, h, w), m(0, (H - h) % H, (W - w) % W));
}

TEST(FreqFilterParams, ValidationAndJson) {
  EXPECT_THROW((FreqFilterParams{0.0, 1.0, 0.1, 0.2}.validate()), DomainError);
  EXPECT_THROW((FreqFilterParams{1.0, -1.0, 0.1, 0.2}.validate()), DomainError);
  EXPECT_THROW((FreqFilterParams{1.0, 1.0, 0.0, 0.2}.validate()), DomainError);
  EXPECT_THROW((FreqFilterParams{1.0, 1.0, 0.3, 0.2}.validate()), DomainError);
  EXPECT_THROW((FreqFilterParams{1.0, 1.0, 0.1, 0.2, TransformKind::DCT, 4}.validate()), DomainError);
  EXPECT_NO_THROW((FreqFilterParams{1.3, 0.9, 0.1, 0.1}.validate()));

  const FreqFilterParams p{0.984, 0.967, 0.4, 0.455, TransformKind::DFT, 3};
  const auto doc = p.to_json();
  for (const char* key : {"lambda1", "lambda2", "r1", "r2", "transform", "zones"}) EXPECT_TRUE(doc.contains(key));
  EXPECT_EQ(doc["transform"], "dft");
  EXPECT_EQ(FreqFilterParams::from_json(doc), p);
  auto bad = doc;
  bad["r1"] = 0.9;
  EXPECT_THROW(FreqFilterParams::from_json(bad), DomainError);
}

TEST(SpaceMask, ConstantDatasetGivesOnes) {
  const Shape s{3, 4, 5};
  const ImageDataset ds({Tensor::ones(s), Tensor::ones(s)});
  const SpaceFilter f = build_space_mask(ds);
  EXPECT_TRUE(f.mask().all_equal(1.0));
  EXPECT_TRUE(f.is_identity());
  EXPECT_EQ(f.mask(), identity_space_mask(s).mask());
}

TEST(SpaceMask, SinglePixelExample) {
  Tensor a({1, 3, 3}), b({1, 3, 3});
  // mean |x| at (1, 2) is e - 1 from two items of opposite sign.
  a(0, 1, 2) = std::numbers::e - 1.0;
  b(0, 1, 2) = -(std::numbers::e - 1.0);
  const SpaceFilter f = build_space_mask(ImageDataset({a, b}));
  for (std::size_t h = 0; h < 3; ++h)
    for (std::size_t w = 0; w < 3; ++w)
      EXPECT_NEAR(f.mask()(0, h, w), (h == 1 && w == 2) ? 1.0 : 1.0 / 3.0, 1e-15);
  EXPECT_FALSE(f.is_identity());
}

TEST(SpaceMask, RangeAndDegenerateInput) {
  NoiseSource src(21);
  std::vector<Tensor> items;
  for (int i = 0; i < 6; ++i) items.push_back(draw_normal(src, {2, 6, 7}));
  const SpaceFilter f = build_space_mask(ImageDataset(items));
  for (double v : f.mask().values()) {
    EXPECT_GE(v, 1.0 / 3.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_THROW(build_space_mask(ImageDataset({Tensor({1, 2, 2})})), DegenerateError);
}

TEST(ApplyTdas, IdentityAndScalarMasks) {
  NoiseSource src(22);
  const Shape s{3, 9, 14};
  const Tensor z = draw_normal(src, s);
  for (auto kind : {TransformKind::DCT, TransformKind::DFT}) {
    EXPECT_EQ(apply_tdas(z, identity_space_mask(s), Tensor::ones(s), kind), z);
    Tensor half(s);
    for (double& v : half.values()) v = 0.5;
    EXPECT_LE(max_abs_diff(apply_tdas(z, identity_space_mask(s), half, kind), 0.5 * z), 1e-12);
  }
  const TdasFilter id = TdasFilter::identity(s);
  EXPECT_TRUE(id.is_identity());
  EXPECT_EQ(id.apply(z), z);
}

TEST(ApplyTdas, MatchesNaiveComposition) {
  NoiseSource src(23);
  const Shape s{2, 7, 10};
  const Tensor z = draw_normal(src, s);
  Tensor space_mask(s);
  for (double& v : space_mask.values()) v = 1.0 / 3.0 + src.uniform() * 2.0 / 3.0;
  const SpaceFilter space(space_mask);
  for (auto kind : {TransformKind::DCT, TransformKind::DFT}) {
    const FreqFilterParams p{0.6, 0.3, 0.25, 0.5, kind, 3};
    const Tensor freq = build_freq_mask(p, s);
    const Tensor y = hadamard(space_mask, z);
    Tensor expected;
    if (kind == TransformKind::DCT) {
      expected = oracle::naive_idct2(hadamard(freq, oracle::naive_dct2(y)));
    } else {
      SpectrumGrid g = oracle::naive_dft2(y);
      g.re = hadamard(freq, g.re);
      g.im = hadamard(freq, g.im);
      expected = oracle::naive_idft2_real(g);
    }
    EXPECT_LE(max_abs_diff(apply_tdas(z, space, freq, kind), expected), 1e-10) << to_string(kind);
    EXPECT_LE(max_abs_diff(TdasFilter(space, freq, kind).apply(z), expected), 1e-10);
  }
}

TEST(ApplyTdas, LinearAndEnergyNonIncreasing) {
  NoiseSource src(24);
  const Shape s{1, 16, 16};
  for (auto kind : {TransformKind::DCT, TransformKind::DFT}) {
    const Tensor freq = build_freq_mask({0.7, 0.2, 0.2, 0.4, kind, 3}, s);
    const SpaceFilter space = identity_space_mask(s);
    for (int trial = 0; trial < 10; ++trial) {
      const Tensor x = draw_normal(src, s), y = draw_normal(src, s);
      const double a = src.normal(), b = src.normal();
      const Tensor lhs = apply_tdas(a * x + b * y, space, freq, kind);
      const Tensor rhs = a * apply_tdas(x, space, freq, kind) + b * apply_tdas(y, space, freq, kind);
      EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
      EXPECT_LE(norm(apply_tdas(x, space, freq, kind)), norm(x) + 1e-12);
    }
  }
}

TEST(ApplyTdas, DctSpectralVarianceFollowsMaskSquared) {
  NoiseSource src(25);
  const Shape s{1, 6, 6};
  const Tensor freq = build_freq_mask({0.6, 0.25, 0.3, 0.6, TransformKind::DCT, 3}, s);
  const SpaceFilter space = identity_space_mask(s);
  const int n = 20000;
  std::vector<double> sum(s.size(), 0.0), sq(s.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const Tensor c = dct2(apply_tdas(draw_normal(src, s), space, freq, TransformKind::DCT));
    for (std::size_t k = 0; k < s.size(); ++k) {
      sum[k] += c[k];
      sq[k] += c[k] * c[k];
    }
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double var = sq[k] / n - (sum[k] / n) * (sum[k] / n);
    const double target = freq[k] * freq[k];
    // Sample variance of a normal has standard error target * sqrt(2 / n).
    EXPECT_NEAR(var, target, 4.0 * target * std::sqrt(2.0 / n)) << k;
  }
}

TEST(ApplyTdas, ShapeMismatchThrows) {
  const Shape s{1, 4, 4};
  EXPECT_THROW(apply_tdas(Tensor({1, 4, 5}), identity_space_mask(s), Tensor::ones(s), TransformKind::DCT),
               ShapeError);
  EXPECT_THROW(TdasFilter(identity_space_mask(s), Tensor::ones({1, 4, 5}), TransformKind::DCT), ShapeError);
}

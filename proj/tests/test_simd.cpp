#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tdas/noise.hpp"
#include "tdas/simd.hpp"

using namespace tdas;
using simd::cplx;

namespace {

std::vector<double> randn(NoiseSource& src, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = src.normal();
  return v;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    vec_ = simd::avx2_kernels();
    if (vec_ == nullptr) GTEST_SKIP() << "AVX2 kernels unavailable on this CPU";
  }
  const simd::KernelTable& ref_ = simd::scalar_kernels();
  const simd::KernelTable* vec_ = nullptr;
};

// Lengths cover empty input, every tail remainder, and the unrolled main loop.
constexpr std::size_t kMaxLen = 37;

}  // namespace

TEST_F(KernelEquivalence, Reductions) {
  NoiseSource src(1);
  for (std::size_t n = 0; n <= kMaxLen; ++n) {
    const auto a = randn(src, n), b = randn(src, n);
    const double tol = 1e-13 * (1.0 + n);
    EXPECT_NEAR(ref_.dot(a.data(), b.data(), n), vec_->dot(a.data(), b.data(), n), tol);
    EXPECT_NEAR(ref_.squared_distance(a.data(), b.data(), n),
                vec_->squared_distance(a.data(), b.data(), n), tol);
    EXPECT_NEAR(ref_.sum(a.data(), n), vec_->sum(a.data(), n), tol);
  }
}

TEST_F(KernelEquivalence, Elementwise) {
  NoiseSource src(2);
  for (std::size_t n = 0; n <= kMaxLen; ++n) {
    const auto a = randn(src, n), b = randn(src, n), c = randn(src, n);
    std::vector<double> r(n), v(n);

    ref_.multiply(a.data(), b.data(), r.data(), n);
    vec_->multiply(a.data(), b.data(), v.data(), n);
    EXPECT_EQ(r, v);
    ref_.add(a.data(), b.data(), r.data(), n);
    vec_->add(a.data(), b.data(), v.data(), n);
    EXPECT_EQ(r, v);
    ref_.subtract(a.data(), b.data(), r.data(), n);
    vec_->subtract(a.data(), b.data(), v.data(), n);
    EXPECT_EQ(r, v);
    ref_.scale(0.37, a.data(), r.data(), n);
    vec_->scale(0.37, a.data(), v.data(), n);
    EXPECT_EQ(r, v);

    // FMA variants round once instead of twice.
    r = c;
    v = c;
    ref_.axpy(-1.7, a.data(), r.data(), n);
    vec_->axpy(-1.7, a.data(), v.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r[i], v[i], 1e-14);
    r = c;
    v = c;
    ref_.langevin_step(r.data(), a.data(), b.data(), 0.05, 0.3, n);
    vec_->langevin_step(v.data(), a.data(), b.data(), 0.05, 0.3, n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r[i], v[i], 1e-14);
  }
}

TEST_F(KernelEquivalence, FiniteCheck) {
  for (std::size_t n = 1; n <= kMaxLen; ++n) {
    for (std::size_t bad = 0; bad < n; bad += 3) {
      std::vector<double> a(n, 1.0);
      for (double poison : {std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity()}) {
        a[bad] = poison;
        EXPECT_FALSE(ref_.all_finite(a.data(), n));
        EXPECT_FALSE(vec_->all_finite(a.data(), n));
      }
      a[bad] = 1e308;
      EXPECT_TRUE(ref_.all_finite(a.data(), n));
      EXPECT_TRUE(vec_->all_finite(a.data(), n));
    }
  }
}

TEST_F(KernelEquivalence, ComplexKernels) {
  NoiseSource src(3);
  for (std::size_t n = 0; n <= kMaxLen; ++n) {
    std::vector<cplx> a(n), b(n), r(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = cplx(src.normal(), src.normal());
      b[i] = cplx(src.normal(), src.normal());
    }
    ref_.complex_multiply(a.data(), b.data(), r.data(), n);
    vec_->complex_multiply(a.data(), b.data(), v.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_LE(std::abs(r[i] - v[i]), 1e-14);
  }
  for (std::size_t n = 2; n <= 64; n *= 2) {
    for (std::size_t half = 1; half < n; half *= 2) {
      std::vector<cplx> d(n), tw(half);
      for (auto& x : d) x = cplx(src.normal(), src.normal());
      for (std::size_t j = 0; j < half; ++j) tw[j] = std::polar(1.0, -M_PI * double(j) / double(half));
      auto r = d, v = d;
      ref_.fft_stage(r.data(), tw.data(), n, half);
      vec_->fft_stage(v.data(), tw.data(), n, half);
      for (std::size_t i = 0; i < n; ++i) EXPECT_LE(std::abs(r[i] - v[i]), 1e-14);
    }
  }
}

TEST(Dispatch, SelectionAndOverride) {
  EXPECT_TRUE(simd::select("scalar"));
  EXPECT_STREQ(simd::active().name, "scalar");
  EXPECT_FALSE(simd::select("neon-please"));
  EXPECT_STREQ(simd::active().name, "scalar");
  EXPECT_TRUE(simd::select("auto"));
  if (simd::avx2_kernels() != nullptr) {
    EXPECT_STREQ(simd::active().name, "avx2");
  }
}

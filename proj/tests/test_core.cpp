#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdas/dataset.hpp"
#include "tdas/error.hpp"
#include "tdas/noise.hpp"
#include "tdas/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace tdas;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("tdas_core_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST(NoiseSource, ReplayIsBitIdentical) {
  NoiseSource a(0);
  const Tensor first = draw_normal(a, {3, 4, 5});
  const Tensor second = draw_normal(a, {3, 4, 5});
  EXPECT_NE(first, second);

  NoiseSource b(0);
  EXPECT_EQ(draw_normal(b, {3, 4, 5}), first);
  EXPECT_EQ(draw_normal(b, {3, 4, 5}), second);
  EXPECT_EQ(b.position(), 120u);
}

TEST(NoiseSource, MomentsOfAMillionDraws) {
  NoiseSource src(12345);
  const std::size_t n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = src.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(NoiseSource, DegenerateShapeGivesOneDraw) {
  NoiseSource src(7);
  const Tensor t = draw_normal(src, {1, 1, 1});
  EXPECT_EQ(t.size(), 1u);
  EXPECT_TRUE(std::isfinite(t[0]));
  EXPECT_THROW(draw_normal(src, {0, 1, 1}), ShapeError);
}

TEST(NoiseSource, KnownPrefixIsStable) {
  // Frozen first draws for seed 42; guards the documented generator + transform.
  NoiseSource src(42);
  const double z0 = src.normal();
  const double z1 = src.normal();
  NoiseSource again(42);
  EXPECT_EQ(again.normal(), z0);
  EXPECT_EQ(again.normal(), z1);
  std::mt19937_64 eng(42);
  double u, v, s;
  do {
    u = 2.0 * static_cast<double>(eng() >> 11) * 0x1.0p-53 - 1.0;
    v = 2.0 * static_cast<double>(eng() >> 11) * 0x1.0p-53 - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  EXPECT_EQ(z0, u * std::sqrt(-2.0 * std::log(s) / s));
  EXPECT_EQ(z1, v * std::sqrt(-2.0 * std::log(s) / s));
}

TEST(Seeds, DerivedSeedsAreDistinct) {
  EXPECT_NE(derive_seed(1, std::uint64_t{0}), derive_seed(1, std::uint64_t{1}));
  EXPECT_NE(derive_seed(1, std::uint64_t{0}), derive_seed(2, std::uint64_t{0}));
  EXPECT_NE(derive_seed(1, "reference"), derive_seed(1, "calibration"));
  EXPECT_EQ(derive_seed(9, "x"), derive_seed(9, "x"));
}

TEST(Tensor, ConstructionChecksLength) {
  EXPECT_THROW(Tensor({1, 2, 2}, std::vector<double>(3)), ShapeError);
  Tensor t({2, 3, 4}, 1.5);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_TRUE(t.all_equal(1.5));
  t(1, 2, 3) = 7.0;
  EXPECT_EQ(t[23], 7.0);
  t[0] = std::nan("");
  EXPECT_FALSE(t.all_finite());
}

TEST(Dataset, RejectsEmptyAndMixedShapes) {
  EXPECT_THROW(ImageDataset({}), DegenerateError);
  EXPECT_THROW(ImageDataset({Tensor({1, 2, 2}), Tensor({1, 2, 3})}), ShapeError);
  ImageDataset ds({Tensor({1, 2, 2}, 1.0), Tensor({1, 2, 2}, 3.0)});
  EXPECT_TRUE(ds.mean().all_equal(2.0));
}

TEST(TensorIo, RoundTripIsBitExact) {
  NoiseSource src(3);
  for (const Shape s : {Shape{3, 8, 8}, Shape{1, 1, 1}, Shape{2, 5, 17}, Shape{3, 64, 33}}) {
    const Tensor t = draw_normal(src, s);
    std::stringstream buf;
    write_tensor(buf, t);
    EXPECT_EQ(buf.str().size(), 16 + 8 * s.size());
    const Tensor back = read_tensor(buf);
    ASSERT_EQ(back.shape(), s);
    EXPECT_EQ(0, std::memcmp(back.data(), t.data(), 8 * t.size()));
  }
}

TEST(TensorIo, HeaderLayoutIsLittleEndian) {
  Tensor t({1, 1, 2}, std::vector<double>{1.0, -2.0});
  std::stringstream buf;
  write_tensor(buf, t);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "TDT1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 2);
  // 1.0 = 0x3FF0000000000000, stored low byte first.
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 7]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 6]), 0xF0);
}

TEST(TensorIo, MalformedInputsAreFormatErrors) {
  NoiseSource src(4);
  std::stringstream good;
  write_tensor(good, draw_normal(src, {1, 4, 4}));
  const std::string bytes = good.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_tensor(truncated), FormatError);

  std::stringstream short_header(bytes.substr(0, 10));
  EXPECT_THROW(read_tensor(short_header), FormatError);

  std::string zero_c = bytes;
  zero_c[4] = 0;
  std::stringstream zc(zero_c);
  EXPECT_THROW(read_tensor(zc), FormatError);

  std::string bad_magic = bytes;
  bad_magic[3] = '2';
  std::stringstream bm(bad_magic);
  EXPECT_THROW(read_tensor(bm), FormatError);
}

TEST(ExportImage, ClampAndRounding) {
  const fs::path dir = temp_dir("export");
  export_image(Tensor({1, 2, 3}, -1.0), dir / "lo.pgm", -1.0, 3.0);
  export_image(Tensor({1, 2, 3}, 3.0), dir / "hi.pgm", -1.0, 3.0);
  export_image(Tensor({1, 2, 3}, 1.0), dir / "mid.pgm", -1.0, 3.0);
  export_image(Tensor({3, 2, 2}, 9.0), dir / "rgb.ppm");

  const std::string header = "P5\n3 2\n255\n";
  EXPECT_EQ(slurp(dir / "lo.pgm"), header + std::string(6, '\0'));
  EXPECT_EQ(slurp(dir / "hi.pgm"), header + std::string(6, '\xff'));
  EXPECT_EQ(slurp(dir / "mid.pgm"), header + std::string(6, static_cast<char>(128)));
  EXPECT_EQ(slurp(dir / "rgb.ppm"), "P6\n2 2\n255\n" + std::string(12, '\xff'));

  EXPECT_THROW(export_image(Tensor({2, 2, 2}), dir / "bad.pgm"), DomainError);
}

TEST(DatasetIo, DirectoryRoundTrip) {
  const fs::path dir = temp_dir("dataset");
  NoiseSource src(5);
  ImageDataset ds({draw_normal(src, {1, 4, 4}), draw_normal(src, {1, 4, 4})});
  save_dataset(ds, dir, {{"kind", "test"}});
  const ImageDataset back = load_dataset(dir);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], ds[0]);
  EXPECT_EQ(back[1], ds[1]);
  EXPECT_EQ(read_json(dir / "manifest.json")["spec"]["kind"], "test");
}

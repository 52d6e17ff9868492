#include "tdas/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "tdas/error.hpp"

namespace tdas {
namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kMagic{'T', 'D', 'T', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw FormatError("TDT1: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint32_t checked_dim(std::size_t d) {
  if (d == 0 || d > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("TDT1: dimension out of range");
  return static_cast<std::uint32_t>(d);
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor& t) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, checked_dim(t.channels()));
  put_u32(out, checked_dim(t.height()));
  put_u32(out, checked_dim(t.width()));
  std::vector<char> buf(t.size() * 8);
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(t[i]);
    for (int b = 0; b < 8; ++b) buf[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("TDT1: write failed");
}

Tensor read_tensor(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4)) throw FormatError("TDT1: truncated header");
  if (magic != kMagic) throw FormatError("TDT1: bad magic");
  const std::uint32_t c = get_u32(in);
  const std::uint32_t h = get_u32(in);
  const std::uint32_t w = get_u32(in);
  if (c == 0 || h == 0 || w == 0) throw FormatError("TDT1: zero dimension in header");
  const Shape shape{c, h, w};
  // Guard against absurd headers before allocating.
  if (shape.size() > (std::size_t{1} << 34)) throw FormatError("TDT1: header shape too large");
  std::vector<unsigned char> buf(shape.size() * 8);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
    throw FormatError("TDT1: truncated payload");
  std::vector<double> data(shape.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[i * 8 + b]) << (8 * b);
    data[i] = std::bit_cast<double>(bits);
  }
  return Tensor(shape, std::move(data));
}

void save_tensor(const Tensor& t, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_tensor(out, t);
}

Tensor load_tensor(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_tensor(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void export_image(const Tensor& t, const fs::path& path, double lo, double hi) {
  if (t.channels() != 1 && t.channels() != 3)
    throw DomainError("export_image: unsupported channel count " + std::to_string(t.channels()));
  if (!(hi > lo)) throw DomainError("export_image: clamp range must satisfy lo < hi");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << (t.channels() == 1 ? "P5" : "P6") << '\n' << t.width() << ' ' << t.height() << "\n255\n";
  std::vector<unsigned char> pixels(t.size());
  std::size_t k = 0;
  for (std::size_t h = 0; h < t.height(); ++h)
    for (std::size_t w = 0; w < t.width(); ++w)
      for (std::size_t c = 0; c < t.channels(); ++c) {
        const double v = std::floor(255.0 * (t(c, h, w) - lo) / (hi - lo) + 0.5);
        pixels[k++] = static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
      }
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw Error("write failed: " + path.string());
}

void save_dataset(const ImageDataset& ds, const fs::path& dir, const nlohmann::json& meta) {
  fs::create_directories(dir);
  nlohmann::json items = nlohmann::json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "item_%05zu.tdt", i);
    save_tensor(ds[i], dir / name);
    items.push_back(name);
  }
  const Shape s = ds.shape();
  write_json({{"count", ds.size()},
              {"shape", {s.channels, s.height, s.width}},
              {"items", items},
              {"spec", meta}},
             dir / "manifest.json");
}

ImageDataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a dataset directory: " + dir.string());
  std::vector<fs::path> files;
  if (fs::exists(dir / "manifest.json")) {
    const auto m = read_json(dir / "manifest.json");
    if (!m.contains("items") || !m["items"].is_array())
      throw FormatError(dir.string() + "/manifest.json: missing items list");
    for (const auto& name : m["items"]) files.push_back(dir / name.get<std::string>());
  } else {
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".tdt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  }
  std::vector<Tensor> items;
  items.reserve(files.size());
  for (const auto& f : files) items.push_back(load_tensor(f));
  return ImageDataset(std::move(items));
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json(const nlohmann::json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace tdas

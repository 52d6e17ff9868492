#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "tdas/dataset.hpp"
#include "tdas/tensor.hpp"

namespace tdas {

// TDT1 layout: "TDT1", u32 C, u32 H, u32 W (little-endian), then C*H*W
// little-endian IEEE-754 binary64 values in (c, h, w) row-major order.
void write_tensor(std::ostream& out, const Tensor& t);
Tensor read_tensor(std::istream& in);

void save_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor load_tensor(const std::filesystem::path& path);

// Binary PGM (1 channel) or PPM (3 channels), maxval 255. Values map
// affinely from [lo, hi] to [0, 255], are clamped, and rounded half up:
// pixel = floor(255 * (v - lo) / (hi - lo) + 0.5). The midpoint maps to 128.
void export_image(const Tensor& t, const std::filesystem::path& path, double lo = 0.0,
                  double hi = 1.0);

// Dataset directory: item_NNNNN.tdt files plus manifest.json holding
// {"count", "shape": [C, H, W], "items": [...], "spec": <meta>}.
void save_dataset(const ImageDataset& ds, const std::filesystem::path& dir,
                  const nlohmann::json& meta = nlohmann::json::object());
// Reads the manifest when present, otherwise every *.tdt file in name order.
ImageDataset load_dataset(const std::filesystem::path& dir);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace tdas

#include "tdas/dataset.hpp"

#include "tdas/error.hpp"
#include "tdas/simd.hpp"

namespace tdas {

ImageDataset::ImageDataset(std::vector<Tensor> items) : items_(std::move(items)) {
  if (items_.empty()) throw DegenerateError("dataset must contain at least one item");
  require_valid(items_.front().shape());
  for (const Tensor& t : items_) require_same(items_.front().shape(), t.shape(), "dataset item");
}

Tensor ImageDataset::mean() const {
  Tensor acc(shape());
  const auto& k = simd::active();
  for (const Tensor& t : items_) k.axpy(1.0, t.data(), acc.data(), acc.size());
  k.scale(1.0 / static_cast<double>(items_.size()), acc.data(), acc.data(), acc.size());
  return acc;
}

}  // namespace tdas

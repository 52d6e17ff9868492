#pragma once

#include <cstddef>
#include <vector>

#include "tdas/tensor.hpp"

namespace tdas {

// Non-empty ordered collection of equally shaped tensors.
class ImageDataset {
 public:
  // Throws DegenerateError when empty, ShapeError when shapes differ.
  explicit ImageDataset(std::vector<Tensor> items);

  const Shape& shape() const noexcept { return items_.front().shape(); }
  std::size_t size() const noexcept { return items_.size(); }
  const Tensor& operator[](std::size_t i) const noexcept { return items_[i]; }
  const std::vector<Tensor>& items() const noexcept { return items_; }

  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

  Tensor mean() const;

 private:
  std::vector<Tensor> items_;
};

}  // namespace tdas

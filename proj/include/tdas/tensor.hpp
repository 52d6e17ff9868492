#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tdas {

struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const noexcept { return channels * height * width; }
  std::size_t plane() const noexcept { return height * width; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

// Throws ShapeError when any dimension is zero.
void require_valid(const Shape& s);
// Throws ShapeError naming `what` when the two shapes differ.
void require_same(const Shape& a, const Shape& b, const char* what);

// C x H x W grid of doubles in row-major (c, h, w) order.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor ones(Shape shape) { return Tensor(shape, 1.0); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t channels() const noexcept { return shape_.channels; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t c, std::size_t h, std::size_t w) noexcept {
    return data_[(c * shape_.height + h) * shape_.width + w];
  }
  double operator()(std::size_t c, std::size_t h, std::size_t w) const noexcept {
    return data_[(c * shape_.height + h) * shape_.width + w];
  }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  std::span<double> channel(std::size_t c) noexcept {
    return std::span<double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }
  std::span<const double> channel(std::size_t c) const noexcept {
    return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }

  bool all_finite() const noexcept;
  bool all_equal(double v) const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_{};
  std::vector<double> data_;
};

// Elementwise helpers used across modules; all go through the dispatched kernels.
Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(double s, const Tensor& a);
Tensor hadamard(const Tensor& a, const Tensor& b);

double dot(const Tensor& a, const Tensor& b);
double squared_norm(const Tensor& a);
double norm(const Tensor& a);
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace tdas

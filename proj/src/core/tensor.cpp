#include "tdas/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "tdas/error.hpp"
#include "tdas/simd.hpp"

namespace tdas {

std::string to_string(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

void require_valid(const Shape& s) {
  if (s.channels == 0 || s.height == 0 || s.width == 0)
    throw ShapeError("tensor dimensions must be >= 1, got " + to_string(s));
}

void require_same(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b))
    throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size())
    throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match " +
                     to_string(shape_));
}

bool Tensor::all_finite() const noexcept { return simd::active().all_finite(data(), size()); }

bool Tensor::all_equal(double v) const noexcept {
  return std::all_of(data_.begin(), data_.end(), [v](double x) { return x == v; });
}

Tensor operator+(const Tensor& a, const Tensor& b) {
  require_same(a.shape(), b.shape(), "add");
  Tensor out(a.shape());
  simd::active().add(a.data(), b.data(), out.data(), a.size());
  return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
  require_same(a.shape(), b.shape(), "subtract");
  Tensor out(a.shape());
  simd::active().subtract(a.data(), b.data(), out.data(), a.size());
  return out;
}

Tensor operator*(double s, const Tensor& a) {
  Tensor out(a.shape());
  simd::active().scale(s, a.data(), out.data(), a.size());
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same(a.shape(), b.shape(), "hadamard");
  Tensor out(a.shape());
  simd::active().multiply(a.data(), b.data(), out.data(), a.size());
  return out;
}

double dot(const Tensor& a, const Tensor& b) {
  require_same(a.shape(), b.shape(), "dot");
  return simd::active().dot(a.data(), b.data(), a.size());
}

double squared_norm(const Tensor& a) { return simd::active().dot(a.data(), a.data(), a.size()); }

double norm(const Tensor& a) { return std::sqrt(squared_norm(a)); }

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same(a.shape(), b.shape(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace tdas

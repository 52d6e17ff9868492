#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tdas {

// Base for every error the toolkit raises. CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed tensor / image / JSON document.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Operands whose (C, H, W) shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid argument or parameter outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot produce a meaningful result (all-zero dataset, empty set).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A sampler state became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& where)
      : Error(where + ": non-finite state at step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

struct KappaPoint {
  double r = 0.0;
  double kappa = 0.0;
};

// No radius on the scan grid reaches the requested quantile level.
class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, std::vector<KappaPoint> curve)
      : Error(what), curve_(std::move(curve)) {}

  const std::vector<KappaPoint>& curve() const noexcept { return curve_; }

 private:
  std::vector<KappaPoint> curve_;
};

}  // namespace tdas

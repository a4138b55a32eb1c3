#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lcr/error.hpp"

namespace lcr {

/// Per-axis lengths of a rank 1-3 array. Storage is row-major: the last axis
/// is contiguous.
using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

/// Throws ShapeError unless the shape has rank 1-3 and no zero-length axis.
void validate_shape(const Shape& shape);

/// Dense row-major array of rank 1-3.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  explicit Grid(Shape shape, T fill = T{}) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(element_count(shape_), fill);
  }

  Grid(Shape shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    if (data_.size() != element_count(shape_)) {
      throw ShapeError("grid data has " + std::to_string(data_.size()) +
                       " entries, shape " + to_string(shape_) + " needs " +
                       std::to_string(element_count(shape_)));
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  T& operator()(std::size_t i, std::size_t j) {
    return data_[i * shape_[1] + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  bool operator==(const Grid&) const = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using DataGrid = Grid<double>;
using ComplexGrid = Grid<std::complex<double>>;

/// Throws ShapeMismatch naming `what` when the two shapes differ.
void require_same_shape(const Shape& a, const Shape& b, const char* what);

double frobenius_norm(std::span<const double> values);
double max_abs(std::span<const double> values);

}  // namespace lcr

#include "lcr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace lcr {

std::size_t element_count(const Shape& shape) {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

void validate_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > 3) {
    throw ShapeError("grid rank must be 1, 2 or 3, got " +
                     std::to_string(shape.size()));
  }
  if (std::find(shape.begin(), shape.end(), std::size_t{0}) != shape.end()) {
    throw ShapeError("grid shape " + to_string(shape) + " has an empty axis");
  }
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ShapeMismatch(std::string(what) + ": shape " + to_string(a) +
                        " does not match " + to_string(b));
  }
}

double frobenius_norm(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

double max_abs(std::span<const double> values) {
  double best = 0.0;
  for (double v : values) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace lcr

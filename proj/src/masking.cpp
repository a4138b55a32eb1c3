#include "lcr/masking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "lcr/random.hpp"

namespace lcr {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n <= 1) return 0;
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - (kMax % n + 1) % n;
  std::uint64_t v = next();
  while (v > limit) v = next();
  return v % n;
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

ObservationMask::ObservationMask(Shape shape, bool observed)
    : shape_(std::move(shape)) {
  validate_shape(shape_);
  observed_.assign(element_count(shape_), observed ? 1 : 0);
  observed_count_ = observed ? observed_.size() : 0;
}

ObservationMask::ObservationMask(Shape shape, std::vector<std::uint8_t> observed)
    : shape_(std::move(shape)), observed_(std::move(observed)) {
  validate_shape(shape_);
  if (observed_.size() != element_count(shape_)) {
    throw ShapeError("mask has " + std::to_string(observed_.size()) +
                     " entries, shape " + to_string(shape_) + " needs " +
                     std::to_string(element_count(shape_)));
  }
  for (auto& flag : observed_) flag = flag ? 1 : 0;
  observed_count_ = static_cast<std::size_t>(
      std::count(observed_.begin(), observed_.end(), std::uint8_t{1}));
}

void ObservationMask::set(std::size_t flat, bool observed) {
  const bool was = observed_.at(flat) != 0;
  if (was == observed) return;
  observed_[flat] = observed ? 1 : 0;
  observed ? ++observed_count_ : --observed_count_;
}

ObservationMask ObservationMask::intersect(const ObservationMask& other) const {
  require_same_shape(shape_, other.shape_, "mask intersection");
  std::vector<std::uint8_t> both(observed_.size());
  for (std::size_t i = 0; i < both.size(); ++i) {
    both[i] = observed_[i] & other.observed_[i];
  }
  return ObservationMask(shape_, std::move(both));
}

DataGrid project(const DataGrid& y, const ObservationMask& mask) {
  require_same_shape(y.shape(), mask.shape(), "project");
  DataGrid out(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (mask.observed(i)) out[i] = y[i];
  }
  return out;
}

DataGrid project_complement(const DataGrid& y, const ObservationMask& mask) {
  require_same_shape(y.shape(), mask.shape(), "project_complement");
  DataGrid out(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!mask.observed(i)) out[i] = y[i];
  }
  return out;
}

namespace {

void check_rate(double rate, const char* name) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InvalidRate(std::string(name) + " must lie in [0, 1), got " +
                      std::to_string(rate));
  }
}

std::size_t rounded_count(double rate, std::size_t units) {
  return static_cast<std::size_t>(
      std::llround(rate * static_cast<double>(units)));
}

// First `count` entries of a seeded partial Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> draw_without_replacement(Rng& rng, std::size_t n,
                                                  std::size_t count) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(perm[i], perm[j]);
  }
  perm.resize(count);
  return perm;
}

}  // namespace

ObservationMask uniform_random_mask(const Shape& shape, double missing_rate,
                                    std::uint64_t seed) {
  check_rate(missing_rate, "missing rate");
  validate_shape(shape);
  ObservationMask mask(shape, true);
  const std::size_t channels = shape.size() == 3 ? shape[2] : 1;
  const std::size_t units = mask.size() / channels;
  Rng rng(seed);
  for (std::size_t unit : draw_without_replacement(
           rng, units, rounded_count(missing_rate, units))) {
    for (std::size_t c = 0; c < channels; ++c) {
      mask.set(unit * channels + c, false);
    }
  }
  return mask;
}

ObservationMask slice_mask(const Shape& shape, double row_rate,
                           double col_rate, std::uint64_t seed) {
  check_rate(row_rate, "row rate");
  check_rate(col_rate, "column rate");
  validate_shape(shape);
  if (shape.size() < 2) {
    throw ShapeError("slice masks need a rank 2 or 3 grid, got shape " +
                     to_string(shape));
  }
  const std::size_t rows = shape[0];
  const std::size_t cols = shape[1];
  const std::size_t channels = shape.size() == 3 ? shape[2] : 1;
  ObservationMask mask(shape, true);
  Rng rng(seed);
  for (std::size_t r :
       draw_without_replacement(rng, rows, rounded_count(row_rate, rows))) {
    for (std::size_t j = 0; j < cols * channels; ++j) {
      mask.set(r * cols * channels + j, false);
    }
  }
  for (std::size_t col :
       draw_without_replacement(rng, cols, rounded_count(col_rate, cols))) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < channels; ++c) {
        mask.set((i * cols + col) * channels + c, false);
      }
    }
  }
  return mask;
}

MaskedGrid split_missing(const DataGrid& raw) {
  MaskedGrid out{raw, ObservationMask(raw.shape(), true)};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::isnan(raw[i])) {
      out.grid[i] = 0.0;
      out.mask.set(i, false);
    } else if (!std::isfinite(raw[i])) {
      throw NonFiniteInput("infinite value at flat index " +
                           std::to_string(i));
    }
  }
  return out;
}

}  // namespace lcr

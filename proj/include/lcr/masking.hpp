#pragma once

#include <cstdint>
#include <vector>

#include "lcr/grid.hpp"

namespace lcr {

/// The observed index set: true where a value was observed.
class ObservationMask {
 public:
  ObservationMask() = default;
  /// All entries observed (or none, when `observed` is false).
  explicit ObservationMask(Shape shape, bool observed = true);
  ObservationMask(Shape shape, std::vector<std::uint8_t> observed);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return observed_.size(); }
  std::size_t observed_count() const noexcept { return observed_count_; }
  std::size_t missing_count() const noexcept {
    return observed_.size() - observed_count_;
  }
  bool observed(std::size_t flat) const { return observed_[flat] != 0; }
  const std::vector<std::uint8_t>& flags() const noexcept { return observed_; }

  void set(std::size_t flat, bool observed);

  /// Entry-wise AND, used to combine a data file's own missing markers with
  /// an experiment mask.
  ObservationMask intersect(const ObservationMask& other) const;

  bool operator==(const ObservationMask&) const = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> observed_;
  std::size_t observed_count_ = 0;
};

/// Keeps observed entries, zeroes the rest.
DataGrid project(const DataGrid& y, const ObservationMask& mask);

/// Keeps missing entries, zeroes the observed ones.
DataGrid project_complement(const DataGrid& y, const ObservationMask& mask);

/// Hides exactly round(rate * U) units, drawn without replacement by a
/// partial Fisher-Yates shuffle on Rng(seed). A unit is one entry for rank 1
/// and 2 grids and one pixel (all channels) for rank 3 images.
/// Throws InvalidRate unless 0 <= rate < 1.
ObservationMask uniform_random_mask(const Shape& shape, double missing_rate,
                                    std::uint64_t seed);

/// Hides round(row_rate * rows) whole rows and then round(col_rate * cols)
/// whole columns (across all channels for images), both chosen by the same
/// seeded shuffle. Rank 2 or 3 only.
ObservationMask slice_mask(const Shape& shape, double row_rate,
                           double col_rate, std::uint64_t seed);

/// Splits a grid whose missing entries are NaN into a clean grid (NaN -> 0)
/// and the matching mask. Throws NonFiniteInput on +-Inf.
struct MaskedGrid {
  DataGrid grid;
  ObservationMask mask;
};
MaskedGrid split_missing(const DataGrid& raw);

}  // namespace lcr

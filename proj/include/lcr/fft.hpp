#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lcr/grid.hpp"

namespace lcr {

using cplx = std::complex<double>;

/// Unnormalized complex DFT of one fixed length.
///
/// Lengths whose prime factors are all <= 31 run a mixed-radix Stockham
/// transform (radix 4, 2, 3, 5 specialised, other small primes generic).
/// Anything else goes through Bluestein's chirp-z algorithm on a power-of-two
/// inner transform, so every length is O(n log n).
///
/// A plan is immutable after construction. The transform functions take a
/// caller-owned scratch span of at least scratch_size() entries, so one plan
/// can be shared by several threads as long as each brings its own scratch.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t size() const noexcept { return n_; }
  std::size_t scratch_size() const noexcept;
  bool uses_bluestein() const noexcept { return bluestein_ != nullptr; }

  /// X_k = sum_t x_t exp(-2 pi i k t / n), in place.
  void forward(std::span<cplx> data, std::span<cplx> scratch) const;
  /// sum_k X_k exp(+2 pi i k t / n), in place, without the 1/n factor.
  void backward(std::span<cplx> data, std::span<cplx> scratch) const;

  /// Convenience overloads that allocate their own scratch.
  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

 private:
  struct Stage {
    std::size_t radix;
    std::size_t span;          // product of the radices of earlier stages
    std::vector<cplx> twiddle;  // span * radix entries
    std::vector<cplx> roots;    // exp(-2 pi i s / radix)
  };
  struct Bluestein;

  void stockham(std::span<cplx> data, std::span<cplx> scratch) const;

  std::size_t n_;
  std::vector<Stage> stages_;
  std::unique_ptr<Bluestein> bluestein_;
};

/// Multi-axis DFT over a fixed shape: the 1D transform is applied along each
/// axis in turn. Owns its scratch, so an instance belongs to one thread.
class GridTransform {
 public:
  explicit GridTransform(const Shape& shape);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return count_; }

  void forward(std::span<cplx> data);
  /// Inverse including the 1/P normalisation, P = element count.
  void inverse(std::span<cplx> data);

 private:
  void apply(std::span<cplx> data, bool inverse);

  Shape shape_;
  std::size_t count_;
  std::vector<std::shared_ptr<const FftPlan>> plans_;  // one per axis
  std::vector<cplx> line_;
  std::vector<cplx> scratch_;
};

}  // namespace lcr

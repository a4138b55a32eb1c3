#pragma once

#include <cstdint>
#include <random>

namespace lcr {

/// Seeded generator with platform-independent output.
///
/// std::mt19937_64's output sequence is fixed by the C++ standard, but the
/// standard distributions are not, so bounded integers and normals are
/// derived here from the raw 64-bit stream:
///   - uniform_index(n): rejection sampling on the largest multiple of n
///     below 2^64, then modulo n;
///   - uniform01(): top 53 bits scaled by 2^-53;
///   - normal(): Box-Muller on two uniform01() draws (first output only).
class Rng {
 public:
  static constexpr const char* kAlgorithm =
      "mt19937_64/rejection-modulo/fisher-yates";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t uniform_index(std::uint64_t n);
  double uniform01();
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace lcr

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace lcr {

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  double max_error = 0.0;  // worst observed deviation
  double tolerance = 0.0;
};

/// Spectral and kernel identities on seeded random inputs: transform round
/// trip, Parseval, convolution theorem against the circulant product, the
/// three forms of the Laplacian regularizer, the convolution-matrix norm
/// identity, separable-kernel DFT factorisation, shrinkage optimality and
/// the CircNNM reduction.
std::vector<SelfTestCheck> run_selftest(std::uint64_t seed = 20240101);

nlohmann::json to_json(const std::vector<SelfTestCheck>& checks);

}  // namespace lcr

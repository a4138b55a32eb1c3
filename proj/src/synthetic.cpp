#include "lcr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lcr/random.hpp"

namespace lcr::synthetic {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

DataGrid two_harmonic_series(std::size_t length, double noise_sigma,
                             std::uint64_t seed) {
  Rng rng(seed);
  DataGrid y({length});
  for (std::size_t t = 0; t < length; ++t) {
    const double time = static_cast<double>(t);
    y[t] = std::sin(kTwoPi * time / 48.0) + 0.5 * std::sin(kTwoPi * time / 96.0) +
           noise_sigma * rng.normal();
  }
  return y;
}

DataGrid daily_profiles(std::size_t series, std::size_t length,
                        std::size_t period, double noise_sigma,
                        std::uint64_t seed) {
  Rng rng(seed);
  DataGrid y({series, length});
  const double p = static_cast<double>(period);
  for (std::size_t n = 0; n < series; ++n) {
    const double shift = rng.uniform01() * 0.1 * p;
    const double level = 55.0 + 10.0 * rng.uniform01();
    const double depth = 0.5 + rng.uniform01();
    for (std::size_t t = 0; t < length; ++t) {
      const double phase = std::fmod(static_cast<double>(t) + shift, p) / p;
      // Morning and evening congestion dips on a slow daily wave.
      const double morning = std::exp(-std::pow((phase - 0.33) / 0.05, 2.0));
      const double evening = std::exp(-std::pow((phase - 0.72) / 0.07, 2.0));
      const double wave = std::cos(kTwoPi * phase);
      y(n, t) = level - depth * (14.0 * morning + 18.0 * evening) + 2.0 * wave +
                noise_sigma * rng.normal();
    }
  }
  return y;
}

DataGrid smooth_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  DataGrid img({rows, cols, 3});
  for (std::size_t c = 0; c < 3; ++c) {
    const double fx = 1.0 + rng.uniform01() * 2.0;
    const double fy = 1.0 + rng.uniform01() * 2.0;
    const double phase = rng.uniform01() * kTwoPi;
    struct Blob {
      double cy, cx, radius, weight;
    };
    Blob blobs[3];
    for (auto& b : blobs) {
      b = {rng.uniform01(), rng.uniform01(), 0.1 + 0.15 * rng.uniform01(),
           60.0 * (rng.uniform01() - 0.5)};
    }
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        const double u = static_cast<double>(i) / static_cast<double>(rows);
        const double v = static_cast<double>(j) / static_cast<double>(cols);
        double value = 128.0 + 50.0 * std::sin(kTwoPi * fx * u + phase) *
                                   std::cos(kTwoPi * fy * v);
        for (const auto& b : blobs) {
          const double d2 = (u - b.cy) * (u - b.cy) + (v - b.cx) * (v - b.cx);
          value += b.weight * std::exp(-d2 / (2.0 * b.radius * b.radius));
        }
        img(i, j, c) = std::clamp(value, 0.0, 255.0);
      }
    }
  }
  return img;
}

}  // namespace lcr::synthetic

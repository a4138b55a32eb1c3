#pragma once

#include <cstdint>

#include "lcr/grid.hpp"

namespace lcr::synthetic {

/// sin(2 pi t / 48) + 0.5 sin(2 pi t / 96) + N(0, noise_sigma^2).
DataGrid two_harmonic_series(std::size_t length, double noise_sigma,
                             std::uint64_t seed);

/// Speed-like N x T matrix: every series is the same daily profile
/// (period `period` steps, morning and evening dips) with its own phase
/// shift, level and amplitude, plus N(0, noise_sigma^2).
DataGrid daily_profiles(std::size_t series, std::size_t length,
                        std::size_t period, double noise_sigma,
                        std::uint64_t seed);

/// Smooth M x N x 3 image with values in [0, 255]: a few low-frequency
/// waves and Gaussian blobs per channel.
DataGrid smooth_image(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace lcr::synthetic

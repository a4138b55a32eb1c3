#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcr/grid.hpp"
#include "lcr/masking.hpp"

namespace lcr {

enum class Format {
  Csv,     // rank 1: one column; rank 2: rows = series, columns = time
  Binary,  // "LCRD" header + little-endian float64 payload
  Ppm,     // 8-bit P6/P3 (colour) or P5/P2 (grey) raster
  Png,     // 8-bit RGB raster
};

std::string_view to_string(Format f);
/// Accepts csv, bin/binary/lcrd, ppm/pgm/pnm, png.
Format parse_format(std::string_view name);
/// Picks the format from the file extension; throws ParseError if unknown.
Format format_from_path(const std::string& path);

struct DatasetMeta {
  std::string source;
  std::optional<double> peak;  // data-format maximum, 255 for rasters
};

/// A grid plus the entries that were present in the file. Missing markers
/// (NaN or an empty CSV cell) become mask-false entries holding 0.
struct Dataset {
  DataGrid grid;
  ObservationMask mask;
  DatasetMeta meta;
};

Dataset load_dataset(const std::string& path, std::optional<Format> format = {});

/// Writes `grid`; entries the mask hides are written as NaN in CSV and
/// binary files. Rasters are clamped to [0, 255] and rounded, and ignore the
/// mask.
void write_dataset(const std::string& path, const DataGrid& grid,
                   const ObservationMask* mask = nullptr,
                   std::optional<Format> format = {});

/// Mask files are flat text: a "# shape=A,B,C" line, then one 0/1 per
/// line in row-major order.
void write_mask(const std::string& path, const ObservationMask& mask);
ObservationMask read_mask(const std::string& path);

// Binary layout: bytes 0-3 "LCRD", bytes 4-7 rank (u32), then one u32 per
// axis, zero padding up to the next multiple of 16 bytes, then the values as
// float64, row-major. All integers and floats are little-endian.
inline constexpr char kBinaryMagic[4] = {'L', 'C', 'R', 'D'};
std::size_t binary_header_size(std::size_t rank);

}  // namespace lcr

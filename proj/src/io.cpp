#include "lcr/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace lcr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'");
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool is_missing_token(std::string_view cell) {
  if (cell.empty()) return true;
  const std::string key = lower(cell);
  return key == "nan" || key == "na" || key == "null";
}

double parse_cell(std::string_view cell, const std::string& path,
                  std::size_t line, std::size_t column) {
  if (is_missing_token(cell)) return kNaN;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw ParseError(path + ":" + std::to_string(line) + ": column " +
                     std::to_string(column) + ": cannot parse '" +
                     std::string(cell) + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw NonFiniteInput(path + ":" + std::to_string(line) + ": column " +
                         std::to_string(column) + ": infinite value");
  }
  return value;
}

// "# shape=4,5,3" comment lines override the inferred CSV shape.
std::optional<Shape> parse_shape_comment(std::string_view line) {
  line = trim(line.substr(1));
  if (line.substr(0, 6) != "shape=") return std::nullopt;
  line.remove_prefix(6);
  Shape shape;
  while (!line.empty()) {
    const auto comma = line.find(',');
    const auto token = trim(line.substr(0, comma));
    std::size_t v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw ParseError("bad shape comment '" + std::string(line) + "'");
    }
    shape.push_back(v);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return shape;
}

Dataset load_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<double> values;
  std::optional<Shape> declared;
  std::size_t rows = 0;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto s = parse_shape_comment(line)) declared = s;
      continue;
    }
    std::size_t cells = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto cell = trim(line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start));
      values.push_back(parse_cell(cell, path, line_no, cells + 1));
      ++cells;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      width = cells;
    } else if (cells != width) {
      throw ShapeError(path + ":" + std::to_string(line_no) + ": row has " +
                       std::to_string(cells) + " cells, expected " +
                       std::to_string(width));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path + ": no data rows");

  Shape shape = width == 1 ? Shape{rows} : Shape{rows, width};
  if (declared) {
    if (element_count(*declared) != values.size()) {
      throw ShapeError(path + ": declared shape " + to_string(*declared) +
                       " does not match " + std::to_string(values.size()) +
                       " values");
    }
    shape = *declared;
  }
  MaskedGrid split = split_missing(DataGrid(shape, std::move(values)));
  return {std::move(split.grid), std::move(split.mask), {path, std::nullopt}};
}

void write_csv(const std::string& path, const DataGrid& grid,
               const ObservationMask* mask) {
  auto out = open_output(path);
  const auto value = [&](std::size_t i) {
    return (mask && !mask->observed(i)) ? kNaN : grid[i];
  };
  if (grid.rank() == 3) {
    out << "# shape=" << grid.extent(0) << ',' << grid.extent(1) << ','
        << grid.extent(2) << '\n';
  }
  const std::size_t width = grid.rank() == 1 ? 1 : grid.shape().back();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << format_double(value(i));
    out << ((i + 1) % width == 0 ? '\n' : ',');
  }
}

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int b = 0; b < 8; ++b) r = (r << 8) | ((v >> (8 * b)) & 0xff);
  return r;
}

Dataset load_binary(const std::string& path) {
  const std::string text = read_file(path);
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
  if (text.size() < 8 || std::memcmp(bytes, kBinaryMagic, 4) != 0) {
    throw ParseError(path + ": offset 0: missing LCRD magic");
  }
  const std::uint32_t rank = load_u32(bytes + 4);
  if (rank < 1 || rank > 3) {
    throw ParseError(path + ": offset 4: rank " + std::to_string(rank) +
                     " outside 1..3");
  }
  const std::size_t header = binary_header_size(rank);
  if (text.size() < header) throw ParseError(path + ": truncated header");
  Shape shape;
  for (std::uint32_t a = 0; a < rank; ++a) shape.push_back(load_u32(bytes + 8 + 4 * a));
  validate_shape(shape);
  const std::size_t count = element_count(shape);
  if (text.size() != header + 8 * count) {
    throw ParseError(path + ": offset " + std::to_string(header) + ": payload has " +
                     std::to_string(text.size() - header) + " bytes, expected " +
                     std::to_string(8 * count));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t raw;
    std::memcpy(&raw, bytes + header + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little(raw));
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (std::isinf(values[i])) {
      throw NonFiniteInput(path + ": offset " + std::to_string(header + 8 * i) +
                           ": infinite value");
    }
  }
  MaskedGrid split = split_missing(DataGrid(shape, std::move(values)));
  return {std::move(split.grid), std::move(split.mask), {path, std::nullopt}};
}

void write_binary(const std::string& path, const DataGrid& grid,
                  const ObservationMask* mask) {
  std::string out(kBinaryMagic, 4);
  store_u32(out, static_cast<std::uint32_t>(grid.rank()));
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    store_u32(out, static_cast<std::uint32_t>(grid.extent(a)));
  }
  out.resize(binary_header_size(grid.rank()), '\0');
  out.reserve(out.size() + 8 * grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = (mask && !mask->observed(i)) ? kNaN : grid[i];
    const std::uint64_t raw = to_little(std::bit_cast<std::uint64_t>(v));
    char buf[8];
    std::memcpy(buf, &raw, 8);
    out.append(buf, 8);
  }
  auto file = open_output(path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

// Netpbm: P2/P5 grey, P3/P6 colour, maxval <= 255.
Dataset load_ppm(const std::string& path) {
  const std::string text = read_file(path);
  std::size_t pos = 0;
  const auto next_token = [&]() -> std::string {
    while (pos < text.size()) {
      if (text[pos] == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw ParseError(path + ": offset " + std::to_string(pos) + ": truncated header");
    return text.substr(start, pos - start);
  };
  const auto next_number = [&]() -> std::size_t {
    const std::size_t at = pos;
    const std::string tok = next_token();
    std::size_t v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ParseError(path + ": offset " + std::to_string(at) + ": expected an integer, got '" + tok + "'");
    }
    return v;
  };

  const std::string magic = next_token();
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    throw ParseError(path + ": offset 0: unsupported netpbm magic '" + magic + "'");
  }
  const bool ascii = magic == "P2" || magic == "P3";
  const std::size_t channels = (magic == "P3" || magic == "P6") ? 3 : 1;
  const std::size_t width = next_number();
  const std::size_t height = next_number();
  const std::size_t maxval = next_number();
  if (maxval == 0 || maxval > 255) {
    throw ParseError(path + ": only 8-bit rasters are supported (maxval " +
                     std::to_string(maxval) + ")");
  }
  DataGrid grid({height, width, channels});
  if (ascii) {
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(next_number());
  } else {
    ++pos;  // single whitespace after maxval
    if (text.size() < pos + grid.size()) {
      throw ParseError(path + ": offset " + std::to_string(pos) + ": truncated pixel data");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = static_cast<unsigned char>(text[pos + i]);
    }
  }
  Shape shape = grid.shape();
  return {std::move(grid), ObservationMask(shape, true), {path, static_cast<double>(maxval)}};
}

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0));
}

void require_image(const DataGrid& grid, const char* what) {
  if (grid.rank() != 3 || (grid.extent(2) != 1 && grid.extent(2) != 3)) {
    throw ShapeError(std::string(what) + " output needs an M x N x 1 or M x N x 3 grid, got " +
                     to_string(grid.shape()));
  }
}

void write_ppm(const std::string& path, const DataGrid& grid) {
  require_image(grid, "PPM");
  auto out = open_output(path);
  out << (grid.extent(2) == 3 ? "P6" : "P5") << '\n'
      << grid.extent(1) << ' ' << grid.extent(0) << "\n255\n";
  std::string bytes(grid.size(), '\0');
  for (std::size_t i = 0; i < grid.size(); ++i) bytes[i] = static_cast<char>(to_byte(grid[i]));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Dataset load_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw ParseError(path + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ParseError(path + ": " + image.message);
  }
  DataGrid grid({image.height, image.width, 3});
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = pixels[i];
  Shape shape = grid.shape();
  return {std::move(grid), ObservationMask(shape, true), {path, 255.0}};
}

void write_png(const std::string& path, const DataGrid& grid) {
  require_image(grid, "PNG");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(grid.extent(1));
  image.height = static_cast<png_uint_32>(grid.extent(0));
  image.format = grid.extent(2) == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> pixels(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) pixels[i] = to_byte(grid[i]);
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw ParseError(path + ": " + image.message);
  }
}

}  // namespace

std::size_t binary_header_size(std::size_t rank) {
  const std::size_t used = 8 + 4 * rank;
  return (used + 15) / 16 * 16;
}

std::string_view to_string(Format f) {
  switch (f) {
    case Format::Csv:
      return "csv";
    case Format::Binary:
      return "bin";
    case Format::Ppm:
      return "ppm";
    case Format::Png:
      return "png";
  }
  return "unknown";
}

Format parse_format(std::string_view name) {
  const std::string key = lower(name);
  if (key == "csv") return Format::Csv;
  if (key == "bin" || key == "binary" || key == "lcrd") return Format::Binary;
  if (key == "ppm" || key == "pgm" || key == "pnm") return Format::Ppm;
  if (key == "png") return Format::Png;
  throw ParseError("unknown format '" + std::string(name) + "'");
}

Format format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) {
    throw ParseError("cannot infer the format of '" + path + "'; pass --format");
  }
  return parse_format(std::string_view(path).substr(dot + 1));
}

Dataset load_dataset(const std::string& path, std::optional<Format> format) {
  switch (format.value_or(format_from_path(path))) {
    case Format::Csv:
      return load_csv(path);
    case Format::Binary:
      return load_binary(path);
    case Format::Ppm:
      return load_ppm(path);
    case Format::Png:
      return load_png(path);
  }
  throw ParseError("unsupported format");
}

void write_dataset(const std::string& path, const DataGrid& grid,
                   const ObservationMask* mask, std::optional<Format> format) {
  if (mask) require_same_shape(grid.shape(), mask->shape(), "write_dataset");
  switch (format.value_or(format_from_path(path))) {
    case Format::Csv:
      return write_csv(path, grid, mask);
    case Format::Binary:
      return write_binary(path, grid, mask);
    case Format::Ppm:
      return write_ppm(path, grid);
    case Format::Png:
      return write_png(path, grid);
  }
}

void write_mask(const std::string& path, const ObservationMask& mask) {
  auto out = open_output(path);
  out << "# shape=";
  for (std::size_t a = 0; a < mask.shape().size(); ++a) {
    out << (a ? "," : "") << mask.shape()[a];
  }
  out << '\n';
  std::string body;
  body.reserve(2 * mask.size());
  for (auto flag : mask.flags()) {
    body.push_back(flag ? '1' : '0');
    body.push_back('\n');
  }
  out << body;
}

ObservationMask read_mask(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string raw;
  std::optional<Shape> shape;
  std::vector<std::uint8_t> flags;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto s = parse_shape_comment(line)) shape = s;
      continue;
    }
    if (line != "0" && line != "1") {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": mask entries must be 0 or 1, got '" + std::string(line) + "'");
    }
    flags.push_back(line == "1" ? 1 : 0);
  }
  if (!shape) shape = Shape{flags.size()};
  if (element_count(*shape) != flags.size()) {
    throw ShapeError(path + ": shape " + to_string(*shape) + " needs " +
                     std::to_string(element_count(*shape)) + " entries, found " +
                     std::to_string(flags.size()));
  }
  return ObservationMask(*shape, std::move(flags));
}

}  // namespace lcr

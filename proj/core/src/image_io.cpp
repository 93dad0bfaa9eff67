#include "gcspn/image_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace gcspn {

namespace {

static_assert(sizeof(float) == 4, "require 32-bit float");

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("pfm: " + what);
}

// Reads one whitespace-delimited header token.
std::string next_token(std::istream& in) {
  std::string tok;
  in >> tok;
  return tok;
}

std::uint32_t byteswap32(std::uint32_t x) {
  return ((x & 0xFFu) << 24) | ((x & 0xFF00u) << 8) | ((x >> 8) & 0xFF00u) |
         ((x >> 24) & 0xFFu);
}

float from_le(std::uint32_t bits, bool swap) {
  if (swap) bits = byteswap32(bits);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

FeatureGrid read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path.string() + "'");

  const std::string magic = next_token(in);
  if (magic != "Pf") fail("malformed header: expected magic 'Pf'");

  long width = 0;
  long height = 0;
  double scale = 0.0;
  if (!(in >> width >> height >> scale) || width <= 0 || height <= 0) {
    fail("malformed header: bad dimensions");
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    fail("malformed header: bad scale");
  }
  // Exactly one whitespace byte separates the header from the payload.
  in.get();
  if (!in) fail("truncated file: missing payload");

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::uint32_t> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), count * 4);
  if (static_cast<std::size_t>(in.gcount()) != count * 4) {
    fail("truncated file: payload too short");
  }

  // scale < 0 declares little-endian storage, scale > 0 big-endian.
  const bool file_le = scale < 0.0;
  const bool host_le = std::endian::native == std::endian::little;
  const bool swap = file_le != host_le;

  std::vector<double> values(count);
  for (long y = 0; y < height; ++y) {
    const long src_row = height - 1 - y;  // bottom-up in the file
    for (long x = 0; x < width; ++x) {
      const float f = from_le(raw[src_row * width + x], swap);
      if (!std::isfinite(f)) fail("non-finite value in payload");
      values[y * width + x] = static_cast<double>(f);
    }
  }
  return FeatureGrid(height, width, 1, std::move(values));
}

namespace {

void write_pfm_impl(std::size_t height, std::size_t width,
                    std::span<const double> values,
                    const std::filesystem::path& path) {
  for (double v : values) {
    if (!std::isfinite(v)) fail("refusing to write non-finite value");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write '" + path.string() + "'");

  out << "Pf\n" << width << " " << height << "\n-1.0\n";
  const bool host_le = std::endian::native == std::endian::little;
  std::vector<std::uint32_t> row(width);
  for (std::size_t y = height; y-- > 0;) {  // bottom row first
    for (std::size_t x = 0; x < width; ++x) {
      const float f = static_cast<float>(values[y * width + x]);
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      row[x] = host_le ? bits : byteswap32(bits);
    }
    out.write(reinterpret_cast<const char*>(row.data()), width * 4);
  }
  if (!out) fail("write failed for '" + path.string() + "'");
}

}  // namespace

void write_pfm(const FeatureGrid& grid, const std::filesystem::path& path) {
  if (grid.channels() != 1) fail("only single-channel grids are supported");
  write_pfm_impl(grid.height(), grid.width(), grid.values(), path);
}

void write_pfm(const DepthGrid& grid, const std::filesystem::path& path) {
  write_pfm_impl(grid.height(), grid.width(), grid.values(), path);
}

void write_pgm16(const DepthGrid& grid, const std::filesystem::path& path,
                 double max_depth) {
  if (!(max_depth > 0.0)) {
    throw std::invalid_argument("pgm: max_depth must be positive");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("pgm: cannot write '" + path.string() + "'");

  out << "P5\n" << grid.width() << " " << grid.height() << "\n65535\n";
  std::vector<std::uint8_t> row(grid.width() * 2);
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      double t = grid.at(y, x) / max_depth;
      t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
      const auto v = static_cast<std::uint16_t>(std::floor(t * 65535.0 + 0.5));
      row[2 * x] = static_cast<std::uint8_t>(v >> 8);  // big-endian
      row[2 * x + 1] = static_cast<std::uint8_t>(v & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw std::runtime_error("pgm: write failed for '" + path.string() + "'");
}

}  // namespace gcspn

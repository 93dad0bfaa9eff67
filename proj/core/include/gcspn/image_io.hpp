#pragma once

#include <filesystem>

#include "gcspn/grid.hpp"

namespace gcspn {

/// Reads a single-channel portable float map ("Pf").
/// Rows are converted from the file's bottom-up storage to the library's
/// top-down convention. Fails distinctly on malformed headers, truncated
/// payloads and non-finite values.
FeatureGrid read_pfm(const std::filesystem::path& path);

/// Writes a single-channel PFM: header "Pf\n{w} {h}\n-1.0\n" followed by
/// little-endian float32 samples, bottom row first. Non-finite values are
/// refused.
void write_pfm(const FeatureGrid& grid, const std::filesystem::path& path);
void write_pfm(const DepthGrid& grid, const std::filesystem::path& path);

/// Writes a 16-bit binary PGM (maxval 65535, big-endian samples) with
/// pixel = round(clamp(d / max_depth, 0, 1) * 65535), halves rounding up.
void write_pgm16(const DepthGrid& grid, const std::filesystem::path& path,
                 double max_depth);

}  // namespace gcspn

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gcspn {

/// Pinhole intrinsics. f_p/f_q are the focal lengths in pixels along the
/// row/column axes, (c_p, c_q) the principal point. p indexes rows, q columns.
struct CameraIntrinsics {
  double f_p{1.0};
  double f_q{1.0};
  double c_p{0.0};
  double c_q{0.0};
};

/// H x W depth map in meters, row-major with the top row first.
/// A value of exactly 0 means "no measurement"; valid depths are positive.
/// Grids are immutable once built; derived maps are new grids.
class DepthGrid {
 public:
  DepthGrid() = default;
  DepthGrid(std::size_t height, std::size_t width, double fill = 0.0);
  DepthGrid(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  double at(std::size_t y, std::size_t x) const {
    return values_[y * width_ + x];
  }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const DepthGrid& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool is_finite() const;

 private:
  std::size_t height_{0};
  std::size_t width_{0};
  std::vector<double> values_;
};

/// H x W x C feature map, row-major pixels with interleaved channels.
class FeatureGrid {
 public:
  FeatureGrid() = default;
  FeatureGrid(std::size_t height, std::size_t width, std::size_t channels,
              std::vector<double> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return values_[(y * width_ + x) * channels_ + c];
  }
  std::span<const double> values() const { return values_; }
  bool is_finite() const;

 private:
  std::size_t height_{0};
  std::size_t width_{0};
  std::size_t channels_{0};
  std::vector<double> values_;
};

/// Row-major boolean grid.
struct MaskGrid {
  std::size_t height{0};
  std::size_t width{0};
  std::vector<std::uint8_t> values;

  bool at(std::size_t y, std::size_t x) const { return values[y * width + x] != 0; }
};

/// True exactly where the depth value is strictly positive.
MaskGrid valid_mask(const DepthGrid& grid);

/// Number of strictly positive entries.
std::size_t valid_count(const DepthGrid& grid);

/// Single-channel view conversions between the two grid types.
FeatureGrid to_feature(const DepthGrid& grid);
DepthGrid to_depth(const FeatureGrid& grid);

}  // namespace gcspn

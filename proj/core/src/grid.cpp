#include "gcspn/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gcspn {

DepthGrid::DepthGrid(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), values_(height * width, fill) {}

DepthGrid::DepthGrid(std::size_t height, std::size_t width,
                     std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height_ * width_) {
    throw std::invalid_argument("grid: value count does not match dimensions");
  }
}

bool DepthGrid::is_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width,
                         std::size_t channels, std::vector<double> values)
    : height_(height),
      width_(width),
      channels_(channels),
      values_(std::move(values)) {
  if (values_.size() != height_ * width_ * channels_) {
    throw std::invalid_argument("grid: value count does not match dimensions");
  }
}

bool FeatureGrid::is_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

MaskGrid valid_mask(const DepthGrid& grid) {
  MaskGrid mask;
  mask.height = grid.height();
  mask.width = grid.width();
  mask.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    mask.values[i] = grid[i] > 0.0 ? 1 : 0;
  }
  return mask;
}

std::size_t valid_count(const DepthGrid& grid) {
  std::size_t n = 0;
  for (double v : grid.values()) {
    if (v > 0.0) ++n;
  }
  return n;
}

FeatureGrid to_feature(const DepthGrid& grid) {
  std::vector<double> values(grid.values().begin(), grid.values().end());
  return FeatureGrid(grid.height(), grid.width(), 1, std::move(values));
}

DepthGrid to_depth(const FeatureGrid& grid) {
  if (grid.channels() != 1) {
    throw std::invalid_argument("grid: expected a single-channel feature grid");
  }
  std::vector<double> values(grid.values().begin(), grid.values().end());
  return DepthGrid(grid.height(), grid.width(), std::move(values));
}

}  // namespace gcspn

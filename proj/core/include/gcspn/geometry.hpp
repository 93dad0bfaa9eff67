#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "gcspn/grid.hpp"

namespace gcspn {

/// Camera-frame 3D point in meters.
struct Point3 {
  double u{0.0};
  double v{0.0};
  double w{0.0};
};

/// Pixel coordinate plus depth, the image-side counterpart of Point3.
struct PixelDepth {
  double p{0.0};
  double q{0.0};
  double d{0.0};
};

/// Back-projects pixel (p, q) at depth d through the pinhole model:
/// u = d*(p - c_p)/f_p, v = d*(q - c_q)/f_q, w = d. Requires d > 0.
Point3 backproject(double p, double q, double d, const CameraIntrinsics& intr);

/// Inverse of backproject; requires pt.w > 0.
PixelDepth project(const Point3& pt, const CameraIntrinsics& intr);

/// Per-node nearest-neighbor table. Each row lists k node indices sorted by
/// (distance, index); a node never lists itself and rows carry no duplicates.
class NeighborTable {
 public:
  NeighborTable() = default;
  NeighborTable(std::size_t n_nodes, std::size_t k,
                std::vector<std::uint32_t> entries);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t k() const { return k_; }
  std::span<const std::uint32_t> row(std::size_t i) const {
    return {entries_.data() + i * k_, k_};
  }

  bool operator==(const NeighborTable&) const = default;

 private:
  std::size_t n_nodes_{0};
  std::size_t k_{0};
  std::vector<std::uint32_t> entries_;
};

/// Exhaustive k-nearest-neighbors in Euclidean metric, ties broken by lower
/// index. Requires 1 <= k < points.size().
NeighborTable knn(std::span<const Point3> points, std::size_t k);

/// Same search over arbitrary-dimension row vectors (one row per node).
NeighborTable knn(const Eigen::MatrixXd& rows, std::size_t k);

}  // namespace gcspn

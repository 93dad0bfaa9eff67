#pragma once

#include <Eigen/Core>
#include <vector>

#include "gcspn/geometry.hpp"
#include "gcspn/grid.hpp"

namespace gcspn {

/// Partition of an H x W image into non-overlapping P_h x P_w patches.
/// Image dimensions must divide evenly; node n covers patch-grid cell
/// (n / grid_w, n % grid_w) in row-major order.
class PatchLayout {
 public:
  PatchLayout() = default;
  PatchLayout(std::size_t image_h, std::size_t image_w, std::size_t patch_h,
              std::size_t patch_w);

  std::size_t patch_h() const { return patch_h_; }
  std::size_t patch_w() const { return patch_w_; }
  std::size_t grid_h() const { return grid_h_; }
  std::size_t grid_w() const { return grid_w_; }
  std::size_t image_h() const { return grid_h_ * patch_h_; }
  std::size_t image_w() const { return grid_w_ * patch_w_; }
  std::size_t node_count() const { return grid_h_ * grid_w_; }
  std::size_t patch_len() const { return patch_h_ * patch_w_; }

  /// Top-left pixel of node n's patch.
  std::pair<std::size_t, std::size_t> patch_origin(std::size_t n) const {
    return {(n / grid_w_) * patch_h_, (n % grid_w_) * patch_w_};
  }

 private:
  std::size_t patch_h_{0}, patch_w_{0};
  std::size_t grid_h_{0}, grid_w_{0};
};

/// Node features paired with geometry. Each of the N rows holds the
/// flattened patch state followed by the node's back-projected patch-center
/// position divided by pos_scale (feature length L = P_h*P_w + 3).
/// `positions` keeps the unscaled centers used for neighbor search.
struct PatchGraph {
  PatchLayout layout;
  Eigen::MatrixXd features;      // N x L
  std::vector<Point3> positions; // N, unscaled
  NeighborTable neighbors;
  CameraIntrinsics intr;
  double pos_scale{1.0};

  PatchGraph() = default;
  PatchGraph(PatchLayout layout, Eigen::MatrixXd features,
             std::vector<Point3> positions, NeighborTable neighbors,
             CameraIntrinsics intr, double pos_scale);

  std::size_t node_count() const { return layout.node_count(); }
  std::size_t feature_len() const { return layout.patch_len() + 3; }
};

/// Flattens a C-channel grid (C = P_h*P_w) into N x (P_h*P_w) node rows.
/// Element l = i*P_w + j of node n reads channel l at the patch's own pixel
/// (y_n + i, x_n + j).
Eigen::MatrixXd gather_patches(const FeatureGrid& feat, const PatchLayout& layout);

/// Exact inverse placement of gather_patches; every pixel written once.
/// Negative values clamp to 0, the depth-validity sentinel.
DepthGrid scatter_patches(const Eigen::MatrixXd& nodes, const PatchLayout& layout);

struct EmbedResult {
  Eigen::MatrixXd features;       // N x (P_h*P_w + 3)
  std::vector<Point3> positions;  // unscaled patch-center back-projections
};

/// Appends each node's back-projected patch-center position (scaled by
/// 1/scale) to its patch row. The center depth is the mean of the node's
/// current depth patch, floored at 1e-6 m.
EmbedResult embed_positions(const Eigen::MatrixXd& nodes,
                            const DepthGrid& depth_readout,
                            const PatchLayout& layout,
                            const CameraIntrinsics& intr, double scale);

/// k-nearest neighbors over the graph's current unscaled center positions.
NeighborTable rebuild_topology(const PatchGraph& graph, std::size_t k);

}  // namespace gcspn

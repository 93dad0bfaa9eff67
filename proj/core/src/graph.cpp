#include "gcspn/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace gcspn {

PatchLayout::PatchLayout(std::size_t image_h, std::size_t image_w,
                         std::size_t patch_h, std::size_t patch_w)
    : patch_h_(patch_h), patch_w_(patch_w) {
  if (patch_h == 0 || patch_w == 0) {
    throw std::invalid_argument("layout: patch dimensions must be positive");
  }
  if (image_h % patch_h != 0 || image_w % patch_w != 0) {
    throw std::invalid_argument(
        "layout: image dimensions must be divisible by the patch size");
  }
  grid_h_ = image_h / patch_h;
  grid_w_ = image_w / patch_w;
}

PatchGraph::PatchGraph(PatchLayout layout_in, Eigen::MatrixXd features_in,
                       std::vector<Point3> positions_in,
                       NeighborTable neighbors_in, CameraIntrinsics intr_in,
                       double pos_scale_in)
    : layout(layout_in),
      features(std::move(features_in)),
      positions(std::move(positions_in)),
      neighbors(std::move(neighbors_in)),
      intr(intr_in),
      pos_scale(pos_scale_in) {
  const auto n = static_cast<Eigen::Index>(layout.node_count());
  const auto len = static_cast<Eigen::Index>(layout.patch_len() + 3);
  if (features.rows() != n || features.cols() != len) {
    throw std::invalid_argument("graph: feature matrix must be N x (P_h*P_w + 3)");
  }
  if (positions.size() != layout.node_count()) {
    throw std::invalid_argument("graph: one position per node required");
  }
  if (!features.allFinite()) {
    throw std::invalid_argument("graph: non-finite features");
  }
}

Eigen::MatrixXd gather_patches(const FeatureGrid& feat, const PatchLayout& layout) {
  if (feat.channels() != layout.patch_len()) {
    throw std::invalid_argument("gather: channel count must equal P_h*P_w");
  }
  if (feat.height() != layout.image_h() || feat.width() != layout.image_w()) {
    throw std::invalid_argument("gather: grid does not match layout");
  }
  const std::size_t n_nodes = layout.node_count();
  Eigen::MatrixXd nodes(n_nodes, layout.patch_len());
  for (std::size_t n = 0; n < n_nodes; ++n) {
    const auto [y0, x0] = layout.patch_origin(n);
    for (std::size_t i = 0; i < layout.patch_h(); ++i) {
      for (std::size_t j = 0; j < layout.patch_w(); ++j) {
        const std::size_t l = i * layout.patch_w() + j;
        nodes(n, l) = feat.at(y0 + i, x0 + j, l);
      }
    }
  }
  return nodes;
}

DepthGrid scatter_patches(const Eigen::MatrixXd& nodes, const PatchLayout& layout) {
  if (nodes.rows() != static_cast<Eigen::Index>(layout.node_count()) ||
      nodes.cols() < static_cast<Eigen::Index>(layout.patch_len())) {
    throw std::invalid_argument("scatter: node matrix does not match layout");
  }
  std::vector<double> values(layout.image_h() * layout.image_w());
  for (std::size_t n = 0; n < layout.node_count(); ++n) {
    const auto [y0, x0] = layout.patch_origin(n);
    for (std::size_t i = 0; i < layout.patch_h(); ++i) {
      for (std::size_t j = 0; j < layout.patch_w(); ++j) {
        const std::size_t l = i * layout.patch_w() + j;
        const double v = nodes(n, l);
        values[(y0 + i) * layout.image_w() + (x0 + j)] = v > 0.0 ? v : 0.0;
      }
    }
  }
  return DepthGrid(layout.image_h(), layout.image_w(), std::move(values));
}

EmbedResult embed_positions(const Eigen::MatrixXd& nodes,
                            const DepthGrid& depth_readout,
                            const PatchLayout& layout,
                            const CameraIntrinsics& intr, double scale) {
  if (depth_readout.height() != layout.image_h() ||
      depth_readout.width() != layout.image_w()) {
    throw std::invalid_argument("embed: depth grid does not match layout");
  }
  if (nodes.rows() != static_cast<Eigen::Index>(layout.node_count()) ||
      nodes.cols() != static_cast<Eigen::Index>(layout.patch_len())) {
    throw std::invalid_argument("embed: node matrix does not match layout");
  }
  constexpr double kMinDepth = 1e-6;  // keeps the back-projection defined

  const std::size_t n_nodes = layout.node_count();
  const std::size_t patch_len = layout.patch_len();
  EmbedResult out;
  out.features.resize(n_nodes, patch_len + 3);
  out.features.leftCols(patch_len) = nodes;
  out.positions.resize(n_nodes);

  for (std::size_t n = 0; n < n_nodes; ++n) {
    const auto [y0, x0] = layout.patch_origin(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < layout.patch_h(); ++i) {
      for (std::size_t j = 0; j < layout.patch_w(); ++j) {
        sum += depth_readout.at(y0 + i, x0 + j);
      }
    }
    const double mean = sum / static_cast<double>(patch_len);
    const double d = mean > kMinDepth ? mean : kMinDepth;
    const double cp = static_cast<double>(y0) + (layout.patch_h() - 1) / 2.0;
    const double cq = static_cast<double>(x0) + (layout.patch_w() - 1) / 2.0;
    const Point3 pt = backproject(cp, cq, d, intr);
    out.positions[n] = pt;
    out.features(n, patch_len + 0) = pt.u / scale;
    out.features(n, patch_len + 1) = pt.v / scale;
    out.features(n, patch_len + 2) = pt.w / scale;
  }
  return out;
}

NeighborTable rebuild_topology(const PatchGraph& graph, std::size_t k) {
  return knn(std::span<const Point3>(graph.positions), k);
}

}  // namespace gcspn

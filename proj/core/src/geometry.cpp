#include "gcspn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace gcspn {

Point3 backproject(double p, double q, double d, const CameraIntrinsics& intr) {
  if (!(d > 0.0)) {
    throw std::invalid_argument("backproject: depth must be positive");
  }
  Point3 pt;
  pt.u = d * (p - intr.c_p) / intr.f_p;
  pt.v = d * (q - intr.c_q) / intr.f_q;
  pt.w = d;
  return pt;
}

PixelDepth project(const Point3& pt, const CameraIntrinsics& intr) {
  if (!(pt.w > 0.0)) {
    throw std::invalid_argument("project: w must be positive");
  }
  PixelDepth px;
  px.d = pt.w;
  px.p = intr.c_p + pt.u * intr.f_p / pt.w;
  px.q = intr.c_q + pt.v * intr.f_q / pt.w;
  return px;
}

NeighborTable::NeighborTable(std::size_t n_nodes, std::size_t k,
                             std::vector<std::uint32_t> entries)
    : n_nodes_(n_nodes), k_(k), entries_(std::move(entries)) {
  if (entries_.size() != n_nodes_ * k_) {
    throw std::invalid_argument("neighbor table: entry count mismatch");
  }
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    for (std::size_t a = 0; a < k_; ++a) {
      const std::uint32_t j = entries_[i * k_ + a];
      if (j >= n_nodes_) {
        throw std::invalid_argument("neighbor table: index out of range");
      }
      if (j == i) {
        throw std::invalid_argument("neighbor table: node lists itself");
      }
      for (std::size_t b = a + 1; b < k_; ++b) {
        if (entries_[i * k_ + b] == j) {
          throw std::invalid_argument("neighbor table: duplicate neighbor");
        }
      }
    }
  }
}

namespace {

NeighborTable knn_impl(std::size_t n, std::size_t k,
                       const std::function<double(std::size_t, std::size_t)>& dist2) {
  if (k < 1 || k >= n) {
    throw std::invalid_argument("knn: require 1 <= k < number of points");
  }
  std::vector<std::uint32_t> entries(n * k);
  std::vector<std::pair<double, std::uint32_t>> cand;
  cand.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back(dist2(i, j), static_cast<std::uint32_t>(j));
    }
    std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
    std::sort(cand.begin(), cand.begin() + k);
    for (std::size_t a = 0; a < k; ++a) {
      entries[i * k + a] = cand[a].second;
    }
  }
  return NeighborTable(n, k, std::move(entries));
}

}  // namespace

NeighborTable knn(std::span<const Point3> points, std::size_t k) {
  for (const Point3& p : points) {
    if (!std::isfinite(p.u) || !std::isfinite(p.v) || !std::isfinite(p.w)) {
      throw std::invalid_argument("knn: non-finite point");
    }
  }
  return knn_impl(points.size(), k, [&](std::size_t i, std::size_t j) {
    const double du = points[i].u - points[j].u;
    const double dv = points[i].v - points[j].v;
    const double dw = points[i].w - points[j].w;
    return du * du + dv * dv + dw * dw;
  });
}

NeighborTable knn(const Eigen::MatrixXd& rows, std::size_t k) {
  if (!rows.allFinite()) {
    throw std::invalid_argument("knn: non-finite point");
  }
  return knn_impl(static_cast<std::size_t>(rows.rows()), k,
                  [&](std::size_t i, std::size_t j) {
                    return (rows.row(i) - rows.row(j)).squaredNorm();
                  });
}

}  // namespace gcspn

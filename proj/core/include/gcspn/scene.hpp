#pragma once

#include <cstdint>
#include <vector>

#include "gcspn/geometry.hpp"
#include "gcspn/grid.hpp"

namespace gcspn {

struct ScenePlane {
  Point3 point;
  Point3 normal;
};

struct SceneSphere {
  Point3 center;
  double radius{0.0};
};

struct SceneBox {
  Point3 min;
  Point3 max;
};

/// Analytic desk-scale scene: a camera plus a primitive list. Every pixel ray
/// must hit at least one primitive inside [near, far].
struct SceneSpec {
  std::vector<ScenePlane> planes;
  std::vector<SceneSphere> spheres;
  std::vector<SceneBox> boxes;
  CameraIntrinsics intr;
  std::size_t height{0};
  std::size_t width{0};
  double near{0.0};
  double far{0.0};
  std::uint64_t seed{0};

  void validate() const;
};

struct RenderedScene {
  DepthGrid depth;    // nearest positive hit's w per pixel
  DepthGrid shading;  // Lambert term against a fixed light, in [0, 1]
};

/// Ray-casts the scene through the pinhole camera. Throws if any pixel ray
/// escapes every primitive.
RenderedScene render_scene(const SceneSpec& spec);

/// Uniform sample of n valid pixels without replacement (seeded); all other
/// pixels are zeroed.
DepthGrid sample_sparse(const DepthGrid& dense, std::size_t n, std::uint64_t seed);

/// Procedurally fills a scene with a tilted backdrop plane plus a few random
/// spheres and boxes, all inside the view frustum.
SceneSpec make_random_scene(std::size_t height, std::size_t width,
                            const CameraIntrinsics& intr, double near,
                            double far, std::uint64_t seed);

}  // namespace gcspn

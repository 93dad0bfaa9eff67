#include "gcspn/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gcspn/rng.hpp"

namespace gcspn {

void SceneSpec::validate() const {
  if (height == 0 || width == 0) {
    throw std::invalid_argument("scene: empty image");
  }
  if (!(near > 0.0)) throw std::invalid_argument("scene: near must be positive");
  if (!(far > near)) throw std::invalid_argument("scene: far must exceed near");
  if (!(intr.f_p > 0.0) || !(intr.f_q > 0.0)) {
    throw std::invalid_argument("scene: focal lengths must be positive");
  }
  if (planes.empty() && spheres.empty() && boxes.empty()) {
    throw std::invalid_argument("scene: no primitives");
  }
}

namespace {

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Point3 normal;  // unit, oriented toward the camera
};

double dot(const Point3& a, const Point3& b) {
  return a.u * b.u + a.v * b.v + a.w * b.w;
}

Point3 normalize(const Point3& p) {
  const double n = std::sqrt(dot(p, p));
  return {p.u / n, p.v / n, p.w / n};
}

void hit_plane(const ScenePlane& pl, const Point3& dir, Hit& best) {
  const double denom = dot(pl.normal, dir);
  if (denom == 0.0) return;
  const double t = dot(pl.normal, pl.point) / denom;
  if (t > 0.0 && t < best.t) {
    Point3 n = normalize(pl.normal);
    if (dot(n, dir) > 0.0) n = {-n.u, -n.v, -n.w};
    best = {t, n};
  }
}

void hit_sphere(const SceneSphere& sp, const Point3& dir, Hit& best) {
  const double a = dot(dir, dir);
  const double b = -2.0 * dot(dir, sp.center);
  const double c = dot(sp.center, sp.center) - sp.radius * sp.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
    if (t > 0.0 && t < best.t) {
      const Point3 p{t * dir.u, t * dir.v, t * dir.w};
      Point3 n = {(p.u - sp.center.u) / sp.radius,
                  (p.v - sp.center.v) / sp.radius,
                  (p.w - sp.center.w) / sp.radius};
      if (dot(n, dir) > 0.0) n = {-n.u, -n.v, -n.w};
      best = {t, n};
    }
  }
}

void hit_box(const SceneBox& bx, const Point3& dir, Hit& best) {
  double t_enter = 0.0;
  double t_exit = std::numeric_limits<double>::infinity();
  int enter_axis = -1;
  double enter_sign = 0.0;
  const double d[3] = {dir.u, dir.v, dir.w};
  const double lo[3] = {bx.min.u, bx.min.v, bx.min.w};
  const double hi[3] = {bx.max.u, bx.max.v, bx.max.w};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (0.0 < lo[a] || 0.0 > hi[a]) return;  // ray origin is the camera
      continue;
    }
    double t0 = lo[a] / d[a];
    double t1 = hi[a] / d[a];
    double sign = -1.0;  // entering through the low face
    if (t0 > t1) {
      std::swap(t0, t1);
      sign = 1.0;
    }
    if (t0 > t_enter) {
      t_enter = t0;
      enter_axis = a;
      enter_sign = sign;
    }
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return;
  }
  if (enter_axis < 0 || t_enter <= 0.0 || t_enter >= best.t) return;
  Point3 n{0.0, 0.0, 0.0};
  if (enter_axis == 0) n.u = enter_sign;
  if (enter_axis == 1) n.v = enter_sign;
  if (enter_axis == 2) n.w = enter_sign;
  if (dot(n, dir) > 0.0) n = {-n.u, -n.v, -n.w};
  best = {t_enter, n};
}

}  // namespace

RenderedScene render_scene(const SceneSpec& spec) {
  spec.validate();
  // Fixed light direction (from the surface toward the light).
  const Point3 light = normalize({-0.35, -0.25, -0.9});

  std::vector<double> depth(spec.height * spec.width);
  std::vector<double> shade(spec.height * spec.width);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const Point3 dir{(static_cast<double>(y) - spec.intr.c_p) / spec.intr.f_p,
                       (static_cast<double>(x) - spec.intr.c_q) / spec.intr.f_q,
                       1.0};
      Hit best;
      for (const auto& pl : spec.planes) hit_plane(pl, dir, best);
      for (const auto& sp : spec.spheres) hit_sphere(sp, dir, best);
      for (const auto& bx : spec.boxes) hit_box(bx, dir, best);
      if (!std::isfinite(best.t)) {
        throw std::runtime_error("render: pixel ray hits no primitive");
      }
      depth[y * spec.width + x] = best.t;  // depth is the w component
      const double lambert = std::max(0.0, dot(best.normal, light));
      shade[y * spec.width + x] = std::clamp(0.2 + 0.8 * lambert, 0.0, 1.0);
    }
  }
  return {DepthGrid(spec.height, spec.width, std::move(depth)),
          DepthGrid(spec.height, spec.width, std::move(shade))};
}

DepthGrid sample_sparse(const DepthGrid& dense, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> valid;
  valid.reserve(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] > 0.0) valid.push_back(i);
  }
  if (n > valid.size()) {
    throw std::invalid_argument("sample: n exceeds the number of valid pixels");
  }
  Rng rng(seed);
  std::vector<double> out(dense.size(), 0.0);
  // Partial Fisher-Yates: the first n slots become the sample.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_index(valid.size() - i);
    std::swap(valid[i], valid[j]);
    out[valid[i]] = dense[valid[i]];
  }
  return DepthGrid(dense.height(), dense.width(), std::move(out));
}

SceneSpec make_random_scene(std::size_t height, std::size_t width,
                            const CameraIntrinsics& intr, double near,
                            double far, std::uint64_t seed) {
  SceneSpec spec;
  spec.height = height;
  spec.width = width;
  spec.intr = intr;
  spec.near = near;
  spec.far = far;
  spec.seed = seed;
  Rng rng(seed);

  // Gently tilted backdrop well inside [near, far]; the tilt is small enough
  // that every pixel ray still hits it.
  const double back_w = 0.85 * far;
  const Point3 tilt{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), -1.0};
  spec.planes.push_back({{0.0, 0.0, back_w}, tilt});

  auto frustum_point = [&](double depth) {
    const double py = rng.uniform(0.15 * height, 0.85 * height);
    const double px = rng.uniform(0.15 * width, 0.85 * width);
    return backproject(py, px, depth, intr);
  };

  const double lo = near + 0.15 * (far - near);
  const double hi = 0.65 * far;
  const std::size_t n_spheres = 2 + rng.uniform_index(3);
  for (std::size_t i = 0; i < n_spheres; ++i) {
    const double d = rng.uniform(lo, hi);
    const double r = std::min(rng.uniform(0.3, 0.9), 0.5 * (d - near));
    spec.spheres.push_back({frustum_point(d), r});
  }
  const std::size_t n_boxes = 1 + rng.uniform_index(2);
  for (std::size_t i = 0; i < n_boxes; ++i) {
    const double d = rng.uniform(lo, hi);
    const Point3 c = frustum_point(d);
    const double eu = rng.uniform(0.2, 0.7);
    const double ev = rng.uniform(0.2, 0.7);
    const double ew = rng.uniform(0.2, 0.7);
    spec.boxes.push_back({{c.u - eu, c.v - ev, c.w - ew},
                          {c.u + eu, c.v + ev, c.w + ew}});
  }
  return spec;
}

}  // namespace gcspn

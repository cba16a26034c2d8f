#include "lumigeo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "lumigeo/error.hpp"

namespace lumigeo::synthetic {
namespace {

constexpr double kFarDistance = 1.0e7;
constexpr double kMiss = std::numeric_limits<double>::infinity();

struct Primitive {
  enum class Type { kSphere, kBox, kCapsule } type;
  Vec3 a;  // sphere / box center, capsule start
  Vec3 b;  // box half extents, capsule end
  double r = 0.0;
};

// Ray parameters below are for a unit-length direction.
double hit_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r) {
  const Vec3 oc = o - c;
  const double b = oc.dot(d);
  const double h = b * b - (oc.squaredNorm() - r * r);
  if (h < 0.0) return kMiss;
  const double t = -b - std::sqrt(h);
  return t > 0.0 ? t : kMiss;
}

double hit_box(const Vec3& o, const Vec3& d, const Vec3& c, const Vec3& half) {
  double tn = -kMiss, tf = kMiss;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) {
      if (std::abs(o[i] - c[i]) > half[i]) return kMiss;
      continue;
    }
    double t1 = (c[i] - half[i] - o[i]) / d[i];
    double t2 = (c[i] + half[i] - o[i]) / d[i];
    if (t1 > t2) std::swap(t1, t2);
    tn = std::max(tn, t1);
    tf = std::min(tf, t2);
  }
  return (tn <= tf && tn > 0.0) ? tn : kMiss;
}

double hit_capsule(const Vec3& o, const Vec3& d, const Vec3& pa, const Vec3& pb, double r) {
  const Vec3 ba = pb - pa, oa = o - pa;
  const double baba = ba.dot(ba), bard = ba.dot(d), baoa = ba.dot(oa);
  const double rdoa = d.dot(oa), oaoa = oa.dot(oa);
  const double qa = baba - bard * bard;
  const double qb = baba * rdoa - baoa * bard;
  const double qc = baba * oaoa - baoa * baoa - r * r * baba;
  const double h = qb * qb - qa * qc;
  if (h < 0.0) return kMiss;
  if (qa > 0.0) {
    const double t = (-qb - std::sqrt(h)) / qa;
    const double y = baoa + t * bard;
    if (y > 0.0 && y < baba) return t > 0.0 ? t : kMiss;
  }
  // End caps.
  return std::min(hit_sphere(o, d, pa, r), hit_sphere(o, d, pb, r));
}

std::vector<Primitive> primitives(ShapeKind kind) {
  using T = Primitive::Type;
  switch (kind) {
    case ShapeKind::kSphere:
      return {{T::kSphere, Vec3::Zero(), Vec3::Zero(), 0.5}};
    case ShapeKind::kBox:
      return {{T::kBox, Vec3::Zero(), Vec3(0.5, 0.5, 0.5)}};
    case ShapeKind::kCapsuleStack:
      // Head, torso, two legs, two arms; y points down as in image space.
      return {
          {T::kSphere, Vec3(0.0, -0.40, 0.0), Vec3::Zero(), 0.09},
          {T::kCapsule, Vec3(0.0, -0.20, 0.0), Vec3(0.0, 0.05, 0.0), 0.15},
          {T::kCapsule, Vec3(-0.08, 0.12, 0.0), Vec3(-0.09, 0.50, 0.0), 0.06},
          {T::kCapsule, Vec3(0.08, 0.12, 0.0), Vec3(0.09, 0.50, 0.0), 0.06},
          {T::kCapsule, Vec3(-0.19, -0.22, 0.0), Vec3(-0.30, 0.10, 0.02), 0.05},
          {T::kCapsule, Vec3(0.19, -0.22, 0.0), Vec3(0.30, 0.10, -0.02), 0.05},
      };
  }
  return {};
}

Aabb local_bounds(const std::vector<Primitive>& prims) {
  Aabb box{Vec3::Constant(kMiss), Vec3::Constant(-kMiss)};
  auto grow = [&](const Vec3& lo, const Vec3& hi) {
    box.min = box.min.cwiseMin(lo);
    box.max = box.max.cwiseMax(hi);
  };
  for (const auto& p : prims) {
    const Vec3 r = Vec3::Constant(p.r);
    switch (p.type) {
      case Primitive::Type::kSphere: grow(p.a - r, p.a + r); break;
      case Primitive::Type::kBox: grow(p.a - p.b, p.a + p.b); break;
      case Primitive::Type::kCapsule:
        grow(p.a.cwiseMin(p.b) - r, p.a.cwiseMax(p.b) + r);
        break;
    }
  }
  return box;
}

double first_hit(const std::vector<Primitive>& prims, const Vec3& o, const Vec3& d) {
  double best = kMiss;
  for (const auto& p : prims) {
    double t = kMiss;
    switch (p.type) {
      case Primitive::Type::kSphere: t = hit_sphere(o, d, p.a, p.r); break;
      case Primitive::Type::kBox: t = hit_box(o, d, p.a, p.b); break;
      case Primitive::Type::kCapsule: t = hit_capsule(o, d, p.a, p.b, p.r); break;
    }
    best = std::min(best, t);
  }
  return best;
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kSphere: return "sphere";
    case ShapeKind::kBox: return "box";
    case ShapeKind::kCapsuleStack: return "capsule-stack";
  }
  return "?";
}

Scene render(const ShapeParams& shape, const CameraParams& camera) {
  if (camera.width <= 0 || camera.height <= 0) fail(ErrorCode::kInvalidInput, "camera image must be nonempty");
  if (!(shape.depth_to_height > 0.0) || !(shape.aspect > 0.0) || !(camera.fill > 0.0) ||
      !(camera.distance_scale > 0.0)) {
    fail(ErrorCode::kInvalidInput, "shape and camera scales must be positive");
  }
  const auto prims = primitives(shape.kind);
  const Aabb local = local_bounds(prims);
  const Vec3 ext = local.extent();
  const Eigen::Matrix3d scale =
      Vec3(shape.aspect / ext.x(), 1.0 / ext.y(), shape.depth_to_height / ext.z())
          .asDiagonal();
  const Eigen::Matrix3d rot = (Eigen::AngleAxisd(shape.yaw, Vec3::UnitY()) *
                               Eigen::AngleAxisd(shape.pitch, Vec3::UnitX()))
                                  .toRotationMatrix();
  const Eigen::Matrix3d to_world = rot * scale;
  const Eigen::Matrix3d to_local = to_world.inverse();

  // Footprint and bounding radius of the placed object.
  Vec3 lo = Vec3::Constant(kMiss), hi = Vec3::Constant(-kMiss);
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 c((corner & 1) ? local.max.x() : local.min.x(), (corner & 2) ? local.max.y() : local.min.y(),
                 (corner & 4) ? local.max.z() : local.min.z());
    const Vec3 w = to_world * (c - local.center());
    lo = lo.cwiseMin(w);
    hi = hi.cwiseMax(w);
  }
  const double lateral = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const double radius = 0.5 * (hi - lo).norm();
  const double span = camera.fill * std::min(camera.width, camera.height);

  const bool far = camera.projection == Projection::kFarField;
  const double distance = (far ? kFarDistance : 2.0 * radius + 1.0) * camera.distance_scale;
  double focal = span * (far ? distance : distance - radius) / lateral;
  if (!far) focal = std::exp2(std::floor(std::log2(focal)));

  inod::IntrinsicsMatrix k{focal, focal, 0.5 * (camera.width - 1) + camera.principal_dx,
                           0.5 * (camera.height - 1) + camera.principal_dy};
  // Keep the object centered in the image wherever the principal point is.
  const Vec3 center((0.5 * (camera.width - 1) - k.cx) * distance / k.fx,
                    (0.5 * (camera.height - 1) - k.cy) * distance / k.fy, distance);

  Raster<double> depth(camera.width, camera.height);
  bool any = false;
  const double t0 = std::max(0.0, distance - 2.0 * radius - 1.0);
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Vec3 dir((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      // Start the ray near the object so far-field hits keep their precision.
      const Vec3 origin = t0 * dir;
      Vec3 ol = to_local * (origin - center) + local.center();
      Vec3 dl = to_local * dir;
      const double len = dl.norm();
      dl /= len;
      const double t = first_hit(prims, ol, dl);
      if (t == kMiss) continue;
      double z = t0 + t / len;
      if (!far) z = static_cast<double>(static_cast<float>(z));
      depth(u, v) = z;
      any = true;
    }
  }
  if (!any) fail(ErrorCode::kInvalidInput, "shape does not cover any pixel");
  return {shape, k, inod::depth_from_values(std::move(depth))};
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ShapeParams random_shape(std::mt19937_64& rng, ShapeKind kind, double depth_to_height) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  ShapeParams s;
  s.kind = kind;
  s.depth_to_height = depth_to_height > 0.0 ? depth_to_height : 0.1 * std::pow(30.0, uniform01(rng));
  s.aspect = 0.5 + 0.5 * uniform01(rng);
  const double yaw = (15.0 + 35.0 * uniform01(rng)) * kDeg;
  s.yaw = uniform01(rng) < 0.5 ? -yaw : yaw;
  s.pitch = (-20.0 + 40.0 * uniform01(rng)) * kDeg;
  return s;
}

std::vector<Scene> scene_corpus(std::uint64_t seed, int count, const CameraParams& camera) {
  std::mt19937_64 rng(seed);
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    scenes.push_back(render(random_shape(rng, kAllShapes[i % 3]), camera));
  }
  return scenes;
}

}  // namespace lumigeo::synthetic

#pragma once

// Procedural depth scans for tests, benchmarks and the dilation corpus.
// Shapes are ray-cast analytically through a pinhole camera sitting at the
// origin and looking down +z, so depth is the z of the first hit.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "lumigeo/inod.hpp"

namespace lumigeo::synthetic {

enum class ShapeKind { kSphere, kBox, kCapsuleStack };
inline constexpr ShapeKind kAllShapes[] = {ShapeKind::kSphere, ShapeKind::kBox, ShapeKind::kCapsuleStack};
std::string_view to_string(ShapeKind kind);

struct ShapeParams {
  ShapeKind kind = ShapeKind::kSphere;
  double depth_to_height = 1.0;  ///< object-frame z extent over y extent
  double aspect = 0.8;           ///< x extent over y extent
  double yaw = 0.0;              ///< radians about the vertical axis
  double pitch = 0.0;            ///< radians about the horizontal axis
};

enum class Projection {
  kNearField,  ///< object a few units away; strong perspective
  kFarField,   ///< object ~1e7 units away; lateral footprint affine in pixels
};

struct CameraParams {
  int width = 128;
  int height = 128;
  Projection projection = Projection::kNearField;
  double fill = 0.8;            ///< fraction of the shorter image side the object spans
  double distance_scale = 1.0;  ///< moves the camera back; focal length follows in the far field
  double principal_dx = 0.0;    ///< principal point offset from the image center, in pixels
  double principal_dy = 0.0;
};

struct Scene {
  ShapeParams shape;
  inod::IntrinsicsMatrix intrinsics;
  inod::DepthMap depth;
};

/// Renders one shape of unit height, centered in the image whatever the
/// principal point. In the far field the focal length grows with distance so
/// the image scale stays fixed. In the near field the focal length is rounded
/// down to a power of two and depths to float precision, so multiplying every
/// depth by a small-mantissa factor rescales the unprojected cloud exactly.
/// Throws kInvalidInput if the shape misses the image entirely.
Scene render(const ShapeParams& shape, const CameraParams& camera);

/// Uniform double in [0, 1) from a raw 64-bit draw; fixed across platforms.
double uniform01(std::mt19937_64& rng);

/// Random shape of the given kind; D:H drawn in [0.1, 3] unless fixed.
ShapeParams random_shape(std::mt19937_64& rng, ShapeKind kind, double depth_to_height = -1.0);

/// `count` scenes cycling through the shape kinds.
std::vector<Scene> scene_corpus(std::uint64_t seed, int count, const CameraParams& camera);

}  // namespace lumigeo::synthetic

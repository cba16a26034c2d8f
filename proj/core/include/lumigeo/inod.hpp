#pragma once

// Isotropic normalized orthographic depth (iNOD): a single-channel map of the
// z-values of a depth scan after the whole cloud has been centered and divided
// by its longest bounding-box edge. Creation needs pinhole intrinsics,
// recovery does not.

#include <optional>

#include "lumigeo/point_cloud.hpp"
#include "lumigeo/raster.hpp"

namespace lumigeo::inod {

struct IntrinsicsMatrix {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Throws kInvalidInput unless fx, fy > 0 and the principal point lies inside
/// a width x height image.
void validate(const IntrinsicsMatrix& k, int width, int height);

/// Metric depth in meters. Values are kept in double so that uniformly
/// rescaled inputs normalize to the same map.
struct DepthMap {
  Raster<double> values;
  Mask mask;

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }
};

/// Builds a depth map whose mask is every finite, strictly positive pixel.
DepthMap depth_from_values(Raster<double> values);

struct NormalizationRecord {
  Vec3 center = Vec3::Zero();
  double max_edge = 1.0;
};

/// Affine pixel-to-normalized-plane mapping: pixel (u, v) sits at
/// (origin_x + u * pitch_x, origin_y + v * pitch_y). Carries no camera model.
struct OrthoGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pitch_x = 0.0;
  double pitch_y = 0.0;
  friend bool operator==(const OrthoGrid&, const OrthoGrid&) = default;
};

struct INodMap {
  ImageF values;      ///< z in [-1, 1] on foreground and dilated pixels, 0 elsewhere
  Mask mask;          ///< original foreground
  Mask dilated_mask;  ///< pixels added by dilate_foreground; disjoint from mask
  std::optional<OrthoGrid> grid;

  INodMap() = default;
  INodMap(int width, int height)
      : values(width, height), mask(width, height), dilated_mask(width, height) {}

  int width() const noexcept { return values.width(); }
  int height() const noexcept { return values.height(); }
};

/// Checks the range, background-zero and disjointness invariants.
void validate(const INodMap& map);

/// Pinhole unprojection of every masked pixel, in row-major pixel order.
PointCloud unproject(const DepthMap& depth, const IntrinsicsMatrix& k);

struct Normalized {
  PointCloud cloud;
  NormalizationRecord record;
};

/// Centers the cloud on its bounding-box midpoint and divides every axis by
/// the single longest edge, so coordinates land in [-0.5, 0.5].
Normalized isotropic_normalize(const PointCloud& cloud);

/// Writes each point's z into the pixel it came from. Also fits the
/// pixel-to-plane OrthoGrid of the cloud so recovery is exact whenever the
/// lateral coordinates are affine in pixel position.
INodMap project_inod(const PointCloud& normalized_cloud, int width, int height);

/// Grows the foreground by `radius` pixels (Chebyshev). Each added pixel takes
/// the value of its nearest foreground pixel; ties go to the first candidate
/// in row-major order.
INodMap dilate_foreground(const INodMap& map, int radius);

/// Zeroes everything outside `original_mask` and restores it as the mask.
INodMap cutoff(const INodMap& decoded, const Mask& original_mask);

/// Grid used when a map carries none: square pixels, the longer foreground
/// span covering one normalized unit, footprint centered on the origin.
OrthoGrid footprint_grid(const Mask& mask);

/// Orthographic recovery: one point per masked pixel, no intrinsics.
PointCloud unproject_orthographic(const INodMap& map);

struct Encoding {
  INodMap map;
  NormalizationRecord record;
  PointCloud normalized;  ///< kept for round-trip checks
};

/// unproject -> isotropic_normalize -> project_inod.
Encoding encode(const DepthMap& depth, const IntrinsicsMatrix& k);

}  // namespace lumigeo::inod

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace lumigeo {

using Vec3 = Eigen::Vector3d;

struct PixelIndex {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

/// A list of 3D points, optionally carrying the pixel each point came from.
struct PointCloud {
  std::vector<Vec3> points;
  std::optional<std::vector<PixelIndex>> pixel_index;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

struct Aabb {
  Vec3 min;
  Vec3 max;

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) / 2.0; }
  double max_edge() const { return extent().maxCoeff(); }
};

/// Bounding box of a nonempty point list.
Aabb bounding_box(const std::vector<Vec3>& points);

/// Throws kInvalidInput if any coordinate is non-finite, or if pixel_index is
/// present with the wrong length or (when width/height > 0) out of bounds.
void validate(const PointCloud& cloud, int width = 0, int height = 0);

}  // namespace lumigeo

#include "lumigeo/point_cloud.hpp"

#include <string>

#include "lumigeo/error.hpp"

namespace lumigeo {

Aabb bounding_box(const std::vector<Vec3>& points) {
  if (points.empty()) fail(ErrorCode::kEmptyInput, "bounding box of an empty cloud");
  Aabb box{points.front(), points.front()};
  for (const auto& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

void validate(const PointCloud& cloud, int width, int height) {
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (!cloud.points[i].allFinite()) {
      fail(ErrorCode::kInvalidInput, "point " + std::to_string(i) + " is not finite");
    }
  }
  if (!cloud.pixel_index) return;
  const auto& pix = *cloud.pixel_index;
  if (pix.size() != cloud.points.size()) {
    fail(ErrorCode::kInvalidInput, "pixel_index length " + std::to_string(pix.size()) +
                                       " does not match point count " +
                                       std::to_string(cloud.points.size()));
  }
  if (width <= 0 || height <= 0) return;
  for (std::size_t i = 0; i < pix.size(); ++i) {
    if (pix[i].u >= static_cast<std::uint32_t>(width) ||
        pix[i].v >= static_cast<std::uint32_t>(height)) {
      fail(ErrorCode::kInvalidInput, "pixel_index " + std::to_string(i) + " (" +
                                         std::to_string(pix[i].u) + "," +
                                         std::to_string(pix[i].v) + ") out of bounds");
    }
  }
}

}  // namespace lumigeo

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lumigeo/point_cloud.hpp"

namespace lumigeo {

/// Static 3-d tree over a point list. Queries are exact.
class KdTree {
 public:
  struct Hit {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };

  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const noexcept { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  /// Nearest stored point; ties resolve to the lowest index.
  Hit nearest(const Vec3& query) const;

 private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // range into order_
    std::int32_t left = -1, right = -1;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int depth);
  void search(std::int32_t node, const Vec3& q, Hit& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace lumigeo

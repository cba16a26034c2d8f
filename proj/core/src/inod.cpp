#include "lumigeo/inod.hpp"

#include <cmath>
#include <string>

namespace lumigeo::inod {
namespace {

std::string pixel_name(int u, int v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

struct AxisFit {
  double origin = 0.0;
  double pitch = 0.0;
  bool determined = false;
};

// Least-squares line coord = origin + pitch * pixel.
AxisFit fit_axis(const std::vector<double>& pixel, const std::vector<double>& coord) {
  const double n = static_cast<double>(pixel.size());
  double mean_p = 0.0, mean_c = 0.0;
  for (std::size_t i = 0; i < pixel.size(); ++i) {
    mean_p += pixel[i];
    mean_c += coord[i];
  }
  mean_p /= n;
  mean_c /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < pixel.size(); ++i) {
    sxx += (pixel[i] - mean_p) * (pixel[i] - mean_p);
    sxy += (pixel[i] - mean_p) * (coord[i] - mean_c);
  }
  AxisFit fit;
  fit.origin = mean_c;
  if (sxx > 0.0) {
    fit.pitch = sxy / sxx;
    fit.origin = mean_c - fit.pitch * mean_p;
    fit.determined = true;
  }
  return fit;
}

}  // namespace

void validate(const IntrinsicsMatrix& k, int width, int height) {
  if (!(k.fx > 0.0) || !(k.fy > 0.0) || !std::isfinite(k.fx) || !std::isfinite(k.fy)) {
    fail(ErrorCode::kInvalidInput, "intrinsics: focal lengths must be positive and finite");
  }
  if (!(k.cx >= 0.0 && k.cx < width) || !(k.cy >= 0.0 && k.cy < height)) {
    fail(ErrorCode::kInvalidInput, "intrinsics: principal point outside the image");
  }
}

DepthMap depth_from_values(Raster<double> values) {
  DepthMap depth{std::move(values), Mask{}};
  depth.mask = Mask(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    const double d = depth.values.storage()[i];
    depth.mask.storage()[i] = std::isfinite(d) && d > 0.0;
  }
  return depth;
}

void validate(const INodMap& map) {
  require_same_shape(map.values, map.mask, "inod mask");
  require_same_shape(map.values, map.dilated_mask, "inod dilated_mask");
  if (map.values.channels() != 1) fail(ErrorCode::kInvalidInput, "inod map must be single-channel");
  for (int v = 0; v < map.height(); ++v) {
    for (int u = 0; u < map.width(); ++u) {
      const float z = map.values(u, v);
      const bool fg = map.mask(u, v) != 0;
      const bool dil = map.dilated_mask(u, v) != 0;
      if (fg && dil) {
        fail(ErrorCode::kInvalidInput, "inod pixel " + pixel_name(u, v) + " is both foreground and dilated");
      }
      if (fg || dil) {
        if (!std::isfinite(z) || z < -1.0f || z > 1.0f) {
          fail(ErrorCode::kInvalidInput, "inod pixel " + pixel_name(u, v) + " outside [-1, 1]");
        }
      } else if (z != 0.0f) {
        fail(ErrorCode::kInvalidInput, "inod background pixel " + pixel_name(u, v) + " is not 0");
      }
    }
  }
}

PointCloud unproject(const DepthMap& depth, const IntrinsicsMatrix& k) {
  require_same_shape(depth.values, depth.mask, "depth mask");
  validate(k, depth.width(), depth.height());
  PointCloud cloud;
  cloud.pixel_index.emplace();
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      if (!depth.mask(u, v)) continue;
      const double d = depth.values(u, v);
      if (!std::isfinite(d) || d <= 0.0) {
        fail(ErrorCode::kInvalidInput,
             "depth at masked pixel " + pixel_name(u, v) + " is not finite and positive");
      }
      cloud.points.emplace_back((u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d);
      cloud.pixel_index->push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
    }
  }
  return cloud;
}

Normalized isotropic_normalize(const PointCloud& cloud) {
  if (cloud.empty()) fail(ErrorCode::kEmptyInput, "cannot normalize an empty cloud");
  validate(cloud);
  const Aabb box = bounding_box(cloud.points);
  Normalized out;
  out.record.center = box.center();
  out.record.max_edge = box.max_edge();
  if (!(out.record.max_edge > 0.0)) {
    fail(ErrorCode::kDegenerateGeometry, "all points coincide; the cloud has no extent");
  }
  out.cloud.pixel_index = cloud.pixel_index;
  out.cloud.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    out.cloud.points.push_back((p - out.record.center) / out.record.max_edge);
  }
  return out;
}

INodMap project_inod(const PointCloud& normalized_cloud, int width, int height) {
  if (!normalized_cloud.pixel_index) {
    fail(ErrorCode::kInvalidInput, "project_inod needs per-point pixel provenance");
  }
  validate(normalized_cloud, width, height);
  INodMap map(width, height);
  const auto& pix = *normalized_cloud.pixel_index;
  std::vector<double> us, vs, xs, ys;
  us.reserve(pix.size());
  vs.reserve(pix.size());
  xs.reserve(pix.size());
  ys.reserve(pix.size());
  for (std::size_t i = 0; i < pix.size(); ++i) {
    const int u = static_cast<int>(pix[i].u);
    const int v = static_cast<int>(pix[i].v);
    const Vec3& p = normalized_cloud.points[i];
    if (p.z() < -1.0 || p.z() > 1.0) {
      fail(ErrorCode::kInvalidInput, "normalized z of point " + std::to_string(i) + " outside [-1, 1]");
    }
    if (map.mask(u, v)) {
      fail(ErrorCode::kDuplicateProvenance, "two points map to pixel " + pixel_name(u, v));
    }
    map.mask(u, v) = 1;
    map.values(u, v) = static_cast<float>(p.z());
    us.push_back(u);
    vs.push_back(v);
    xs.push_back(p.x());
    ys.push_back(p.y());
  }
  if (!pix.empty()) {
    AxisFit fx = fit_axis(us, xs);
    AxisFit fy = fit_axis(vs, ys);
    // A single row or column leaves one pitch undetermined; borrow the other.
    if (!fx.determined && fy.determined) {
      fx.pitch = fy.pitch;
      fx.origin -= fx.pitch * us.front();
    } else if (!fy.determined && fx.determined) {
      fy.pitch = fx.pitch;
      fy.origin -= fy.pitch * vs.front();
    }
    map.grid = OrthoGrid{fx.origin, fy.origin, fx.pitch, fy.pitch};
  }
  return map;
}

INodMap dilate_foreground(const INodMap& map, int radius) {
  if (radius < 0) fail(ErrorCode::kInvalidInput, "dilation radius must be non-negative");
  require_same_shape(map.values, map.mask, "inod mask");
  INodMap out = map;
  out.dilated_mask = Mask(map.width(), map.height());
  if (radius == 0) return out;
  const int w = map.width();
  const int h = map.height();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (map.mask(u, v)) continue;
      bool found = false;
      // Rings of growing Chebyshev distance, each visited in row-major order.
      for (int d = 1; d <= radius && !found; ++d) {
        for (int y = v - d; y <= v + d && !found; ++y) {
          if (y < 0 || y >= h) continue;
          const bool edge_row = (y == v - d) || (y == v + d);
          const int step = edge_row ? 1 : 2 * d;
          for (int x = u - d; x <= u + d; x += step) {
            if (x < 0 || x >= w || !map.mask(x, y)) continue;
            out.values(u, v) = map.values(x, y);
            out.dilated_mask(u, v) = 1;
            found = true;
            break;
          }
        }
      }
      if (!found) out.values(u, v) = 0.0f;
    }
  }
  return out;
}

INodMap cutoff(const INodMap& decoded, const Mask& original_mask) {
  require_same_shape(decoded.values, original_mask, "cutoff mask");
  INodMap out(decoded.width(), decoded.height());
  out.grid = decoded.grid;
  out.mask = original_mask;
  for (int v = 0; v < decoded.height(); ++v) {
    for (int u = 0; u < decoded.width(); ++u) {
      if (original_mask(u, v)) {
        out.mask(u, v) = 1;
        out.values(u, v) = decoded.values(u, v);
      }
    }
  }
  return out;
}

OrthoGrid footprint_grid(const Mask& mask) {
  int u0 = mask.width(), u1 = -1, v0 = mask.height(), v1 = -1;
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask(u, v)) continue;
      u0 = std::min(u0, u);
      u1 = std::max(u1, u);
      v0 = std::min(v0, v);
      v1 = std::max(v1, v);
    }
  }
  if (u1 < 0) return {};
  const int span = std::max(u1 - u0, v1 - v0);
  const double pitch = span > 0 ? 1.0 / span : 0.0;
  return {-0.5 * (u0 + u1) * pitch, -0.5 * (v0 + v1) * pitch, pitch, pitch};
}

PointCloud unproject_orthographic(const INodMap& map) {
  validate(map);
  const OrthoGrid grid = map.grid ? *map.grid : footprint_grid(map.mask);
  PointCloud cloud;
  cloud.pixel_index.emplace();
  for (int v = 0; v < map.height(); ++v) {
    for (int u = 0; u < map.width(); ++u) {
      if (!map.mask(u, v)) continue;
      cloud.points.emplace_back(grid.origin_x + u * grid.pitch_x, grid.origin_y + v * grid.pitch_y,
                                static_cast<double>(map.values(u, v)));
      cloud.pixel_index->push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
    }
  }
  return cloud;
}

Encoding encode(const DepthMap& depth, const IntrinsicsMatrix& k) {
  Normalized normalized = isotropic_normalize(unproject(depth, k));
  Encoding enc;
  enc.map = project_inod(normalized.cloud, depth.width(), depth.height());
  enc.record = normalized.record;
  enc.normalized = std::move(normalized.cloud);
  return enc;
}

}  // namespace lumigeo::inod

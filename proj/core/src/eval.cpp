#include "lumigeo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "lumigeo/kdtree.hpp"

namespace lumigeo::eval {
namespace {

void check_pair_inputs(const ImageF& pred, const ImageF& gt, const Mask& mask) {
  require_same_shape(pred, gt, "prediction vs ground truth");
  require_same_shape(pred, mask, "image vs mask");
  if (pred.channels() != 3 || gt.channels() != 3) {
    fail(ErrorCode::kInvalidInput, "image metrics expect 3-channel images");
  }
  if (count_set(mask) == 0) fail(ErrorCode::kEmptyInput, "mask selects no pixels");
}

double masked_mse(const AlignedImagePair& pair) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < pair.mask.height(); ++y) {
    for (int x = 0; x < pair.mask.width(); ++x) {
      if (!pair.mask(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = static_cast<double>(pair.prediction(x, y, c)) - pair.ground_truth(x, y, c);
        sum += d * d;
      }
      n += 3;
    }
  }
  if (n == 0) fail(ErrorCode::kEmptyInput, "mask selects no pixels");
  return sum / static_cast<double>(n);
}

std::string pixel_name(int x, int y) { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }

}  // namespace

AlignedImagePair chromatic_align(const ImageF& prediction, const ImageF& ground_truth, const Mask& mask) {
  check_pair_inputs(prediction, ground_truth, mask);
  AlignedImagePair pair{prediction, ground_truth, mask};
  for (int c = 0; c < 3; ++c) {
    double pg = 0.0, pp = 0.0;
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (!mask(x, y)) continue;
        const double p = prediction(x, y, c);
        pg += p * ground_truth(x, y, c);
        pp += p * p;
      }
    }
    pair.degenerate[c] = pp == 0.0;
    pair.scale[c] = pp == 0.0 ? 0.0 : pg / pp;
  }
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        pair.prediction(x, y, c) = static_cast<float>(pair.scale[c] * prediction(x, y, c));
      }
    }
  }
  return pair;
}

AlignedImagePair unaligned(const ImageF& prediction, const ImageF& ground_truth, const Mask& mask) {
  check_pair_inputs(prediction, ground_truth, mask);
  return AlignedImagePair{prediction, ground_truth, mask};
}

double rmse(const AlignedImagePair& pair) { return std::sqrt(masked_mse(pair)); }

double psnr(const AlignedImagePair& pair) {
  const double mse = masked_mse(pair);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const AlignedImagePair& pair) {
  constexpr int kRadius = 5;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  double kernel[2 * kRadius + 1][2 * kRadius + 1];
  double ksum = 0.0;
  for (int dy = -kRadius; dy <= kRadius; ++dy) {
    for (int dx = -kRadius; dx <= kRadius; ++dx) {
      kernel[dy + kRadius][dx + kRadius] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      ksum += kernel[dy + kRadius][dx + kRadius];
    }
  }
  for (auto& row : kernel) {
    for (double& k : row) k /= ksum;
  }

  const Mask& mask = pair.mask;
  const int w = mask.width();
  const int h = mask.height();
  // Window fits when every pixel of it is masked; use a summed-area table.
  std::vector<int> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  auto at = [&](int x, int y) -> int& { return integral[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) at(x + 1, y + 1) = (mask(x, y) != 0) + at(x, y + 1) + at(x + 1, y) - at(x, y);
  }
  constexpr int kWindowArea = (2 * kRadius + 1) * (2 * kRadius + 1);

  double total = 0.0;
  std::size_t windows = 0;
  for (int y = kRadius; y + kRadius < h; ++y) {
    for (int x = kRadius; x + kRadius < w; ++x) {
      const int x0 = x - kRadius, y0 = y - kRadius, x1 = x + kRadius + 1, y1 = y + kRadius + 1;
      if (at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0) != kWindowArea) continue;
      for (int c = 0; c < 3; ++c) {
        double mx = 0.0, my = 0.0;
        for (int dy = -kRadius; dy <= kRadius; ++dy) {
          for (int dx = -kRadius; dx <= kRadius; ++dx) {
            const double k = kernel[dy + kRadius][dx + kRadius];
            mx += k * pair.prediction(x + dx, y + dy, c);
            my += k * pair.ground_truth(x + dx, y + dy, c);
          }
        }
        double vx = 0.0, vy = 0.0, cxy = 0.0;
        for (int dy = -kRadius; dy <= kRadius; ++dy) {
          for (int dx = -kRadius; dx <= kRadius; ++dx) {
            const double k = kernel[dy + kRadius][dx + kRadius];
            const double a = pair.prediction(x + dx, y + dy, c) - mx;
            const double b = pair.ground_truth(x + dx, y + dy, c) - my;
            vx += k * a * a;
            vy += k * b * b;
            cxy += k * a * b;
          }
        }
        total += ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) / ((mx * mx + my * my + kC1) * (vx + vy + kC2));
      }
      ++windows;
    }
  }
  if (windows == 0) return std::numeric_limits<double>::quiet_NaN();
  return total / (3.0 * static_cast<double>(windows));
}

ImageMetrics image_metrics(const AlignedImagePair& pair) { return {psnr(pair), rmse(pair), ssim(pair)}; }

RigidTransform fit_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  if (src.size() != dst.size()) fail(ErrorCode::kInvalidInput, "rigid fit needs paired points");
  if (src.size() < 3) fail(ErrorCode::kDegenerateGeometry, "rigid fit needs at least three points");
  const double n = static_cast<double>(src.size());
  Vec3 src_mean = Vec3::Zero(), dst_mean = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    src_mean += src[i];
    dst_mean += dst[i];
  }
  src_mean /= n;
  dst_mean /= n;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d src_scatter = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - src_mean;
    cov += a * (dst[i] - dst_mean).transpose();
    src_scatter += a * a.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> scatter_svd(src_scatter);
  const Vec3 spread = scatter_svd.singularValues();
  if (!(spread[1] > 1e-12 * spread[0])) {
    fail(ErrorCode::kDegenerateGeometry, "rigid fit source points are collinear");
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d correction = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) correction(2, 2) = -1.0;
  RigidTransform t;
  t.rotation = v * correction * u.transpose();
  t.translation = dst_mean - t.rotation * src_mean;
  return t;
}

std::pair<PointCloud, PointCloud> normalize_shared_cube(const PointCloud& pred, const PointCloud& gt) {
  if (pred.empty() || gt.empty()) fail(ErrorCode::kEmptyInput, "shared-cube normalization of an empty cloud");
  validate(pred);
  validate(gt);
  const Aabb box = bounding_box(gt.points);
  const double half_edge = box.max_edge() / 2.0;
  if (!(half_edge > 0.0)) fail(ErrorCode::kDegenerateGeometry, "ground-truth cloud has no extent");
  const Vec3 center = box.center();
  auto apply = [&](const PointCloud& in) {
    PointCloud out = in;
    for (auto& p : out.points) p = (p - center) / half_edge;
    return out;
  };
  return {apply(pred), apply(gt)};
}

IcpResult icp_align(const PointCloud& pred, const PointCloud& gt, int max_iters, double tol) {
  if (pred.size() < 3 || gt.size() < 3) fail(ErrorCode::kDegenerateGeometry, "ICP needs at least three points per cloud");
  if (max_iters < 0) fail(ErrorCode::kInvalidInput, "ICP iteration count must be non-negative");
  validate(pred);
  validate(gt);
  const KdTree tree(gt.points);

  IcpResult result;
  result.aligned = pred;
  std::vector<Vec3>& current = result.aligned.points;
  std::vector<Vec3> matched(current.size());

  auto correspond = [&]() {
    double sum = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      const KdTree::Hit hit = tree.nearest(current[i]);
      matched[i] = tree.point(hit.index);
      sum += hit.squared_distance;
    }
    return std::sqrt(sum / static_cast<double>(current.size()));
  };

  result.rms_history.push_back(correspond());
  for (int iter = 0; iter < max_iters; ++iter) {
    if (result.rms_history.back() == 0.0) {
      result.converged = true;
      break;
    }
    const RigidTransform step = fit_rigid(current, matched);
    const std::vector<Vec3> before = current, before_matched = matched;
    for (auto& p : current) p = step.apply(p);
    const double rms = correspond();
    const double change = result.rms_history.back() - rms;
    // In exact arithmetic a step never raises the error; at the rounding
    // floor it can, so such a step is undone and the loop ends.
    if (change < 0.0) {
      current = before;
      matched = before_matched;
      result.converged = true;
      break;
    }
    result.transform = step.compose(result.transform);
    result.iterations = iter + 1;
    result.rms_history.push_back(rms);
    if (std::abs(change) < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

GeometryEvalReport chamfer_fscore(const PointCloud& pred, const PointCloud& gt, double threshold) {
  if (pred.empty() || gt.empty()) fail(ErrorCode::kEmptyInput, "Chamfer distance of an empty cloud");
  if (!(threshold > 0.0)) fail(ErrorCode::kInvalidInput, "F-score threshold must be positive");
  const KdTree gt_tree(gt.points);
  const KdTree pred_tree(pred.points);

  auto directed = [threshold](const std::vector<Vec3>& from, const KdTree& to, std::size_t& within) {
    double sum = 0.0;
    within = 0;
    for (const auto& p : from) {
      const double d = std::sqrt(to.nearest(p).squared_distance);
      sum += d;
      within += d < threshold;
    }
    return sum / static_cast<double>(from.size());
  };

  std::size_t pred_within = 0, gt_within = 0;
  const double acc = directed(pred.points, gt_tree, pred_within);
  const double comp = directed(gt.points, pred_tree, gt_within);

  GeometryEvalReport r;
  r.threshold = threshold;
  r.accuracy = kReportDistanceScale * acc;
  r.completeness = kReportDistanceScale * comp;
  r.chamfer = kReportDistanceScale * (acc + comp) / 2.0;
  r.precision = 100.0 * static_cast<double>(pred_within) / static_cast<double>(pred.size());
  r.recall = 100.0 * static_cast<double>(gt_within) / static_cast<double>(gt.size());
  r.f_score = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

GeometryEvaluation evaluate_geometry(const PointCloud& pred, const PointCloud& gt, double threshold,
                                     int icp_iters, double icp_tol) {
  auto [npred, ngt] = normalize_shared_cube(pred, gt);
  GeometryEvaluation out;
  out.icp = icp_align(npred, ngt, icp_iters, icp_tol);
  out.report = chamfer_fscore(out.icp.aligned, ngt, threshold);
  return out;
}

NormalError normal_error(const ImageF& pred_normals, const ImageF& gt_normals, const Mask& mask) {
  check_pair_inputs(pred_normals, gt_normals, mask);
  double angle_sum = 0.0, sq_sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      Vec3 p(pred_normals(x, y, 0), pred_normals(x, y, 1), pred_normals(x, y, 2));
      Vec3 g(gt_normals(x, y, 0), gt_normals(x, y, 1), gt_normals(x, y, 2));
      if (!(p.norm() > 0.0) || !(g.norm() > 0.0) || !p.allFinite() || !g.allFinite()) {
        fail(ErrorCode::kInvalidInput, "zero-length or non-finite normal at pixel " + pixel_name(x, y));
      }
      p.normalize();
      g.normalize();
      angle_sum += std::acos(std::clamp(p.dot(g), -1.0, 1.0)) * 180.0 / std::numbers::pi;
      sq_sum += (p - g).squaredNorm();
      ++n;
    }
  }
  return {angle_sum / static_cast<double>(n), std::sqrt(sq_sum / (3.0 * static_cast<double>(n)))};
}

}  // namespace lumigeo::eval

#pragma once

// Evaluation protocol: chromatic alignment before image metrics, shared-cube
// normalization and ICP before Chamfer / F-score, masked normal error.

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lumigeo/point_cloud.hpp"
#include "lumigeo/raster.hpp"

namespace lumigeo::eval {

struct AlignedImagePair {
  ImageF prediction;  ///< already multiplied by `scale`
  ImageF ground_truth;
  Mask mask;
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  std::array<bool, 3> degenerate{};  ///< channel had sum(pred^2) == 0 on the mask
};

/// Per-channel least-squares scale s_c = sum(p*g) / sum(p*p) over the mask.
AlignedImagePair chromatic_align(const ImageF& prediction, const ImageF& ground_truth, const Mask& mask);

/// Pair with unit scale, for metrics on raw predictions.
AlignedImagePair unaligned(const ImageF& prediction, const ImageF& ground_truth, const Mask& mask);

double rmse(const AlignedImagePair& pair);
/// Peak 1.0; +infinity for identical images.
double psnr(const AlignedImagePair& pair);
/// Mean SSIM over 11x11 Gaussian (sigma 1.5) windows lying entirely inside
/// the mask, averaged over channels. NaN when no window fits.
double ssim(const AlignedImagePair& pair);

struct ImageMetrics {
  double psnr = 0.0;
  double rmse = 0.0;
  double ssim = 0.0;
};
ImageMetrics image_metrics(const AlignedImagePair& pair);

// ---------------------------------------------------------------------------

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  /// this * other: apply other first.
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

/// Closed-form least-squares rigid fit mapping src[i] onto dst[i] (SVD of the
/// cross-covariance with reflection correction). Throws kDegenerateGeometry
/// when src is collinear.
RigidTransform fit_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

/// Scales both clouds with the ground truth's bounding box so the ground
/// truth spans [-1, 1] on its longest axis.
std::pair<PointCloud, PointCloud> normalize_shared_cube(const PointCloud& pred, const PointCloud& gt);

struct IcpResult {
  RigidTransform transform;
  PointCloud aligned;
  /// Nearest-neighbour RMS before the first fit and after each iteration.
  std::vector<double> rms_history;
  int iterations = 0;
  bool converged = false;
};

IcpResult icp_align(const PointCloud& pred, const PointCloud& gt, int max_iters = 50, double tol = 1e-10);

struct GeometryEvalReport {
  // Distances are reported x100, percentages in [0, 100].
  double accuracy = 0.0;
  double completeness = 0.0;
  double chamfer = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double threshold = 0.0;  ///< in normalized units, not scaled
};

inline constexpr double kDefaultFScoreThreshold = 0.05;
inline constexpr double kReportDistanceScale = 100.0;
inline constexpr const char* kChamferConvention = "mean(accuracy, completeness)";

GeometryEvalReport chamfer_fscore(const PointCloud& pred, const PointCloud& gt,
                                  double threshold = kDefaultFScoreThreshold);

struct GeometryEvaluation {
  GeometryEvalReport report;
  IcpResult icp;
};

/// normalize_shared_cube -> icp_align -> chamfer_fscore.
GeometryEvaluation evaluate_geometry(const PointCloud& pred, const PointCloud& gt,
                                     double threshold = kDefaultFScoreThreshold, int icp_iters = 50,
                                     double icp_tol = 1e-10);

struct NormalError {
  double mean_angle_deg = 0.0;
  double rmse = 0.0;
};

/// Normals are renormalized before comparison; zero-length normals on the
/// mask are rejected.
NormalError normal_error(const ImageF& pred_normals, const ImageF& gt_normals, const Mask& mask);

}  // namespace lumigeo::eval

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "helpers.hpp"
#include "lumigeo/eval.hpp"

using namespace lumigeo;
using namespace lumigeo::eval;

namespace {

Eigen::Matrix3d random_rotation(std::mt19937_64& rng, double max_angle) {
  Vec3 axis(testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1));
  axis.normalize();
  return Eigen::AngleAxisd(testutil::uniform(rng, 0, max_angle), axis).toRotationMatrix();
}

// Plain per-window SSIM with the window mask test done pixel by pixel.
double ssim_oracle(const ImageF& a, const ImageF& b, const Mask& mask) {
  const int r = 5;
  double k[11][11], ks = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) ks += k[dy + r][dx + r] = std::exp(-(dx * dx + dy * dy) / 4.5);
  double total = 0.0;
  int windows = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      bool inside = true;
      for (int dy = -r; dy <= r && inside; ++dy)
        for (int dx = -r; dx <= r && inside; ++dx) inside = mask.in_bounds(x + dx, y + dy) && mask(x + dx, y + dy);
      if (!inside) continue;
      ++windows;
      for (int c = 0; c < 3; ++c) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            const double w = k[dy + r][dx + r] / ks;
            const double va = a(x + dx, y + dy, c), vb = b(x + dx, y + dy, c);
            ma += w * va;
            mb += w * vb;
            saa += w * va * va;
            sbb += w * vb * vb;
            sab += w * va * vb;
          }
        const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
        const double c1 = 1e-4, c2 = 9e-4;
        total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      }
    }
  }
  return windows ? total / (3.0 * windows) : std::numeric_limits<double>::quiet_NaN();
}

double brute_directed(const std::vector<Vec3>& from, const std::vector<Vec3>& to, double threshold, int& within) {
  double sum = 0.0;
  within = 0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) best = std::min(best, (p - q).norm());
    sum += best;
    within += best < threshold;
  }
  return sum / from.size();
}

}  // namespace

TEST_CASE("chromatic alignment matches the closed-form scalar fit") {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 10; ++trial) {
    const ImageF p = testutil::random_image(rng, 9, 7, 3, 0.1, 1), g = testutil::random_image(rng, 9, 7, 3);
    Mask m(9, 7);
    for (auto& v : m.storage()) v = testutil::uniform(rng) < 0.6;
    m(0, 0) = 1;
    const AlignedImagePair a = chromatic_align(p, g, m);
    for (int c = 0; c < 3; ++c) {
      Eigen::VectorXd pv(count_set(m)), gv(count_set(m));
      int i = 0;
      for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 9; ++x)
          if (m(x, y)) {
            pv[i] = p(x, y, c);
            gv[i] = g(x, y, c);
            ++i;
          }
      const double s = pv.dot(gv) / pv.squaredNorm();
      CHECK(std::abs(a.scale[c] - s) <= 1e-10 * std::abs(s));
      // Optimality: nudging the scale either way only increases the residual.
      const double e0 = (s * pv - gv).squaredNorm();
      CHECK(e0 <= (1.001 * s * pv - gv).squaredNorm());
      CHECK(e0 <= (0.999 * s * pv - gv).squaredNorm());
      CHECK(!a.degenerate[c]);
    }
  }
}

TEST_CASE("twice the ground truth aligns with scale one half") {
  std::mt19937_64 rng(51);
  const ImageF g = testutil::random_image(rng, 16, 16, 3);
  ImageF p = g;
  for (auto& v : p.storage()) v *= 2.0f;
  const AlignedImagePair a = chromatic_align(p, g, Mask(16, 16, 1, 1));
  for (double s : a.scale) CHECK(s == 0.5);
  CHECK(rmse(a) == 0.0);
  CHECK(psnr(a) == std::numeric_limits<double>::infinity());
}

TEST_CASE("an all-zero channel is flagged degenerate") {
  ImageF p(4, 4, 3, 0.5f), g(4, 4, 3, 0.3f);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) p(x, y, 1) = 0.0f;
  const AlignedImagePair a = chromatic_align(p, g, Mask(4, 4, 1, 1));
  CHECK(a.degenerate[1]);
  CHECK(a.scale[1] == 0.0);
  CHECK(!a.degenerate[0]);
  CHECK(a.scale[0] == doctest::Approx(0.6));
}

TEST_CASE("constant images give the textbook PSNR") {
  const ImageF p(8, 8, 3, 0.5f), g(8, 8, 3, 0.6f);
  const AlignedImagePair u = unaligned(p, g, Mask(8, 8, 1, 1));
  CHECK(rmse(u) == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(psnr(u) == doctest::Approx(20.0).epsilon(1e-5));
}

TEST_CASE("identical images") {
  std::mt19937_64 rng(52);
  const ImageF g = testutil::random_image(rng, 20, 20, 3);
  const AlignedImagePair u = unaligned(g, g, Mask(20, 20, 1, 1));
  CHECK(psnr(u) == std::numeric_limits<double>::infinity());
  CHECK(ssim(u) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("metrics agree with independent oracles") {
  std::mt19937_64 rng(53);
  const ImageF p = testutil::random_image(rng, 30, 24, 3), g = testutil::random_image(rng, 30, 24, 3);
  Mask m(30, 24);
  for (int y = 2; y < 22; ++y)
    for (int x = 3; x < 28; ++x) m(x, y) = !(x > 12 && x < 16 && y > 8 && y < 12);
  const AlignedImagePair u = unaligned(p, g, m);
  double se = 0.0;
  int n = 0;
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 30; ++x)
      if (m(x, y))
        for (int c = 0; c < 3; ++c, ++n) se += std::pow(double(p(x, y, c)) - g(x, y, c), 2);
  CHECK(rmse(u) == doctest::Approx(std::sqrt(se / n)).epsilon(1e-12));
  CHECK(ssim(u) == doctest::Approx(ssim_oracle(p, g, m)).epsilon(1e-8));
  const ImageMetrics all = image_metrics(u);
  CHECK(all.psnr == psnr(u));
  CHECK(all.ssim == ssim(u));
}

TEST_CASE("ssim is NaN when no window fits") {
  const ImageF p(8, 8, 3, 0.2f);
  CHECK(std::isnan(ssim(unaligned(p, p, Mask(8, 8, 1, 1)))));
}

TEST_CASE("aligned metrics are invariant to per-channel prediction scale") {
  std::mt19937_64 rng(54);
  const ImageF p = testutil::random_image(rng, 24, 24, 3, 0.1, 1), g = testutil::random_image(rng, 24, 24, 3);
  const Mask m(24, 24, 1, 1);
  const ImageMetrics base = image_metrics(chromatic_align(p, g, m));
  ImageF scaled = p;
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x)
      for (int c = 0; c < 3; ++c) scaled(x, y, c) *= float(c + 3);
  const ImageMetrics s = image_metrics(chromatic_align(scaled, g, m));
  CHECK(std::abs(s.psnr - base.psnr) <= 1e-6);
  CHECK(std::abs(s.rmse - base.rmse) <= 1e-6 * base.rmse);
  CHECK(std::abs(s.ssim - base.ssim) <= 1e-6);
}

TEST_CASE("image metric errors") {
  const ImageF p(4, 4, 3), g(4, 5, 3);
  CHECK_ERROR_CODE(chromatic_align(p, g, Mask(4, 4)), ErrorCode::kInvalidInput);
  CHECK_ERROR_CODE(chromatic_align(p, p, Mask(4, 4)), ErrorCode::kEmptyInput);
  CHECK_ERROR_CODE(unaligned(ImageF(4, 4, 1), ImageF(4, 4, 1), Mask(4, 4, 1, 1)), ErrorCode::kInvalidInput);
}

TEST_CASE("shared cube uses the ground-truth box for both clouds") {
  PointCloud gt, pred;
  gt.points = {Vec3(0, 0, 0), Vec3(4, 2, 1)};
  pred.points = {Vec3(2, 1, 0.5), Vec3(14, 1, 0.5)};
  const auto [np, ng] = normalize_shared_cube(pred, gt);
  CHECK((ng.points[0] - Vec3(-1, -0.5, -0.25)).norm() < 1e-15);
  CHECK((ng.points[1] - Vec3(1, 0.5, 0.25)).norm() < 1e-15);
  CHECK((np.points[0] - Vec3(0, 0, 0)).norm() < 1e-15);
  CHECK((np.points[1] - Vec3(6, 0, 0)).norm() < 1e-15);
  CHECK_ERROR_CODE(normalize_shared_cube(PointCloud{}, gt), ErrorCode::kEmptyInput);
  PointCloud flat;
  flat.points = {Vec3(1, 1, 1), Vec3(1, 1, 1)};
  CHECK_ERROR_CODE(normalize_shared_cube(pred, flat), ErrorCode::kDegenerateGeometry);
}

TEST_CASE("rigid fit recovers a transform and never reflects") {
  std::mt19937_64 rng(55);
  const PointCloud src = testutil::random_cloud(rng, 50);
  const Eigen::Matrix3d r = random_rotation(rng, std::numbers::pi);
  const Vec3 t(0.3, -0.2, 1.0);
  std::vector<Vec3> dst;
  for (const auto& p : src.points) dst.push_back(r * p + t);
  const RigidTransform fit = fit_rigid(src.points, dst);
  CHECK((fit.rotation - r).norm() < 1e-12);
  CHECK((fit.translation - t).norm() < 1e-12);

  // Mirrored target: best proper rotation, determinant +1.
  std::vector<Vec3> mirrored;
  for (const auto& p : src.points) mirrored.emplace_back(-p.x(), p.y(), p.z());
  CHECK(fit_rigid(src.points, mirrored).rotation.determinant() == doctest::Approx(1.0));

  std::vector<Vec3> line;
  for (int i = 0; i < 5; ++i) line.emplace_back(i, 2 * i, 3 * i);
  CHECK_ERROR_CODE(fit_rigid(line, line), ErrorCode::kDegenerateGeometry);
  CHECK_ERROR_CODE(fit_rigid(src.points, line), ErrorCode::kInvalidInput);
}

TEST_CASE("ICP recovers moderate rigid motions") {
  std::mt19937_64 rng(56);
  PointCloud gt;
  for (int i = 0; i < 1000; ++i) {
    Vec3 p(testutil::uniform(rng, -1, 1), testutil::uniform(rng, -0.6, 0.6), testutil::uniform(rng, -0.3, 0.3));
    p.x() += 0.3 * p.y() * p.y();
    gt.points.push_back(p);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Matrix3d r = random_rotation(rng, std::numbers::pi / 3);
    const Vec3 t = Vec3(testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1))
                       .normalized() * testutil::uniform(rng, 0, 0.5);
    PointCloud pred;
    for (const auto& p : gt.points) pred.points.push_back(r * p + t);
    const IcpResult res = icp_align(pred, gt);
    CHECK(res.rms_history.back() < 1e-6);
    CHECK(res.iterations <= 50);
    CHECK((res.transform.rotation * r - Eigen::Matrix3d::Identity()).norm() < 1e-6);
    for (std::size_t i = 1; i < res.rms_history.size(); ++i) {
      CHECK(res.rms_history[i] <= res.rms_history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("ICP on identical clouds stops immediately") {
  std::mt19937_64 rng(57);
  const PointCloud c = testutil::random_cloud(rng, 100);
  const IcpResult res = icp_align(c, c);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.rms_history == std::vector<double>{0.0});
  CHECK(res.transform.rotation == Eigen::Matrix3d::Identity());
  CHECK_ERROR_CODE(icp_align(PointCloud{}, c), ErrorCode::kDegenerateGeometry);
}

TEST_CASE("chamfer and F-score agree with brute force") {
  std::mt19937_64 rng(58);
  for (int trial = 0; trial < 3; ++trial) {
    const PointCloud a = testutil::random_cloud(rng, 500), b = testutil::random_cloud(rng, 480);
    for (double thr : {0.05, 0.1}) {
      const GeometryEvalReport r = chamfer_fscore(a, b, thr);
      int pa, pb;
      const double acc = brute_directed(a.points, b.points, thr, pa);
      const double comp = brute_directed(b.points, a.points, thr, pb);
      CHECK(std::abs(r.accuracy - 100 * acc) <= 1e-12);
      CHECK(std::abs(r.completeness - 100 * comp) <= 1e-12);
      CHECK(std::abs(r.chamfer - 100 * (acc + comp) / 2) <= 1e-12);
      const double prec = 100.0 * pa / 500, rec = 100.0 * pb / 480;
      CHECK(std::abs(r.precision - prec) <= 1e-12);
      CHECK(std::abs(r.recall - rec) <= 1e-12);
      CHECK(std::abs(r.f_score - 2 * prec * rec / (prec + rec)) <= 1e-12);
    }
  }
}

TEST_CASE("chamfer on an offset lattice") {
  PointCloud a, b;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      a.points.emplace_back(i, j, 0);
      b.points.emplace_back(i, j, 0.02);
    }
  const GeometryEvalReport r = chamfer_fscore(a, b, 0.05);
  CHECK(r.chamfer == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.f_score == 100.0);
  const GeometryEvalReport strict = chamfer_fscore(a, b, 0.01);
  CHECK(strict.f_score == 0.0);
  CHECK(chamfer_fscore(b, a).chamfer == r.chamfer);
  CHECK_ERROR_CODE(chamfer_fscore(a, PointCloud{}), ErrorCode::kEmptyInput);
  CHECK_ERROR_CODE(chamfer_fscore(a, b, 0.0), ErrorCode::kInvalidInput);
}

TEST_CASE("geometry evaluation of a moved copy is perfect") {
  std::mt19937_64 rng(59);
  PointCloud gt = testutil::random_cloud(rng, 400);
  for (auto& p : gt.points) p = p.cwiseProduct(Vec3(1.0, 0.5, 0.25));
  PointCloud pred;
  const Eigen::Matrix3d r = random_rotation(rng, 0.2);
  for (const auto& p : gt.points) pred.points.push_back(r * p + Vec3(0.05, 0, 0));
  const GeometryEvaluation e = evaluate_geometry(pred, gt);
  CHECK(e.report.chamfer < 1e-4);
  CHECK(e.report.f_score == 100.0);
}

TEST_CASE("normal error") {
  ImageF p(2, 1, 3), g(2, 1, 3);
  p(0, 0, 0) = 1;
  g(0, 0, 1) = 1;
  p(1, 0, 2) = 2;
  g(1, 0, 2) = 1;
  const NormalError e = normal_error(p, g, Mask(2, 1, 1, 1));
  CHECK(e.mean_angle_deg == doctest::Approx(45.0).epsilon(1e-12));
  CHECK(e.rmse == doctest::Approx(std::sqrt(2.0 / 6.0)).epsilon(1e-12));

  std::mt19937_64 rng(60);
  const ImageF a = testutil::random_image(rng, 6, 6, 3, -1, 1), b = testutil::random_image(rng, 6, 6, 3, -1, 1);
  double sum = 0.0;
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) {
      const Vec3 u = Vec3(a(x, y, 0), a(x, y, 1), a(x, y, 2)).normalized();
      const Vec3 v = Vec3(b(x, y, 0), b(x, y, 1), b(x, y, 2)).normalized();
      sum += std::acos(std::clamp(u.dot(v), -1.0, 1.0)) * 180 / std::numbers::pi;
    }
  CHECK(normal_error(a, b, Mask(6, 6, 1, 1)).mean_angle_deg == doctest::Approx(sum / 36).epsilon(1e-9));

  ImageF z(2, 1, 3);
  CHECK_ERROR_CODE(normal_error(z, g, Mask(2, 1, 1, 1)), ErrorCode::kInvalidInput);
}

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "lumigeo/envmap.hpp"

using namespace lumigeo;
using namespace lumigeo::envmap;

namespace {

constexpr double kPi = std::numbers::pi;

HdrEnvMap random_env(std::mt19937_64& rng, int h, double hi = 5.0) {
  return HdrEnvMap(testutil::random_image(rng, 2 * h, h, 3, 0.0, hi));
}

// Integrates radiance over the sphere with an independent sin(theta) weight.
double integrated_energy(const HdrEnvMap& env, int c = 0) {
  const int w = env.width(), h = env.height();
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    const double theta = kPi * (y + 0.5) / h;
    const double d_omega = std::sin(theta) * (kPi / h) * (2.0 * kPi / w);
    for (int x = 0; x < w; ++x) sum += env(x, y, c) * d_omega;
  }
  return sum;
}

double max_abs_diff(const HdrEnvMap& a, const HdrEnvMap& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.radiance().size(); ++i) {
    worst = std::max(worst, std::abs(double(a.radiance().storage()[i]) - b.radiance().storage()[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("HdrEnvMap rejects bad shapes and radiance") {
  CHECK_ERROR_CODE(HdrEnvMap(10, 6), ErrorCode::kInvalidInput);
  CHECK_ERROR_CODE(HdrEnvMap(ImageF(8, 4, 1)), ErrorCode::kInvalidInput);
  ImageF neg(8, 4, 3);
  neg(1, 1, 2) = -1.0f;
  CHECK_ERROR_CODE(HdrEnvMap(neg), ErrorCode::kInvalidInput);
  ImageF nan(8, 4, 3);
  nan(0, 0, 0) = std::nanf("");
  CHECK_ERROR_CODE(HdrEnvMap(nan), ErrorCode::kInvalidInput);
}

TEST_CASE("constant unit radiance decomposes to 0.5 and 1") {
  const LdrConditionTriple t = decompose(HdrEnvMap(32, 16, 1.0f));
  for (float v : t.tonemapped.storage()) CHECK(v == 0.5f);
  for (float v : t.log_intensity.storage()) CHECK(v == 1.0f);
}

TEST_CASE("zero map decomposes to zeros with directions intact") {
  const LdrConditionTriple zero = decompose(HdrEnvMap(16, 8));
  const LdrConditionTriple one = decompose(HdrEnvMap(16, 8, 1.0f));
  for (float v : zero.tonemapped.storage()) CHECK(v == 0.0f);
  for (float v : zero.log_intensity.storage()) CHECK(v == 0.0f);
  CHECK(zero.direction == one.direction);
}

TEST_CASE("decomposition matches per-pixel formulas and stays in the unit range") {
  std::mt19937_64 rng(20);
  const HdrEnvMap env = random_env(rng, 8, 50.0);
  const LdrConditionTriple t = decompose(env);
  double y_max = 0.0;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x)
      y_max = std::max(y_max, 0.2126 * env(x, y, 0) + 0.7152 * env(x, y, 1) + 0.0722 * env(x, y, 2));
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 16; ++x) {
      const double lum = 0.2126 * env(x, y, 0) + 0.7152 * env(x, y, 1) + 0.0722 * env(x, y, 2);
      CHECK(t.log_intensity(x, y) == doctest::Approx(std::log(1 + lum) / std::log(1 + y_max)).epsilon(1e-6));
      for (int c = 0; c < 3; ++c) {
        CHECK(t.tonemapped(x, y, c) == doctest::Approx(env(x, y, c) / (1.0 + env(x, y, c))).epsilon(1e-6));
      }
    }
  }
  for (const ImageF* img : {&t.tonemapped, &t.log_intensity, &t.direction}) {
    for (float v : img->storage()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
}

TEST_CASE("latlong convention") {
  const Vec3 center = latlong_direction(0.5, 0.5);
  CHECK((center - Vec3(0, 0, -1)).norm() < 1e-12);
  CHECK((latlong_direction(0.75, 0.5) - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK((latlong_direction(0.25, 0.5) - Vec3(-1, 0, 0)).norm() < 1e-12);
  CHECK((latlong_direction(0.3, 0.0) - Vec3(0, 1, 0)).norm() < 1e-12);

  // The direction map at the center texel decodes to -z up to the half-texel offset.
  const int w = 256, h = 128;
  const LdrConditionTriple t = decompose(HdrEnvMap(w, h, 1.0f));
  Vec3 d;
  for (int c = 0; c < 3; ++c) d[c] = 2.0 * t.direction(w / 2, h / 2, c) - 1.0;
  CHECK((d - Vec3(0, 0, -1)).norm() < 2.0 * kPi / h);

  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const double u = testutil::uniform(rng), v = testutil::uniform(rng, 0.01, 0.99);
    const Vec3 dir = latlong_direction(u, v);
    CHECK(std::abs(dir.norm() - 1.0) < 1e-12);
    double u2, v2;
    direction_to_latlong(dir * 3.0, u2, v2);
    CHECK(std::abs(v2 - v) < 1e-9);
    CHECK(std::abs(std::remainder(u2 - u, 1.0)) < 1e-9);
  }
}

TEST_CASE("direction map texels are unit vectors") {
  const LdrConditionTriple t = decompose(HdrEnvMap(32, 16));
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) {
      Vec3 d;
      for (int c = 0; c < 3; ++c) d[c] = 2.0 * t.direction(x, y, c) - 1.0;
      CHECK(std::abs(d.norm() - 1.0) < 1e-5);
    }
  }
}

TEST_CASE("rotation by zero and full turns is the identity") {
  std::mt19937_64 rng(22);
  const HdrEnvMap env = random_env(rng, 16);
  CHECK(rotate(env, 0.0).radiance() == env.radiance());
  CHECK(max_abs_diff(rotate(env, 2.0 * kPi), env) <= 1e-6);
  CHECK(max_abs_diff(rotate(env, -4.0 * kPi), env) <= 1e-6);
  CHECK_ERROR_CODE(rotate(env, std::nan("")), ErrorCode::kInvalidInput);
}

TEST_CASE("half turn moves a bright texel by half the width with wrap-around") {
  HdrEnvMap env(32, 16);
  env(20, 5, 1) = 7.0f;
  const HdrEnvMap r = rotate(env, kPi);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) {
      CHECK(r(x, y, 1) == ((x == 4 && y == 5) ? 7.0f : 0.0f));
    }
  }
  // A quarter-texel nudge keeps the energy inside the two neighbouring texels.
  const HdrEnvMap nudged = rotate(env, 2.0 * kPi * 0.25 / 32.0);
  CHECK(nudged(20, 5, 1) == doctest::Approx(0.75 * 7.0));
  CHECK(nudged(21, 5, 1) == doctest::Approx(0.25 * 7.0));
}

TEST_CASE("rotation preserves energy") {
  std::mt19937_64 rng(23);
  const HdrEnvMap env = random_env(rng, 32);
  const double e0 = env.total_energy();
  for (int shift = 1; shift < 64; shift += 7) {
    CHECK(rotate(env, 2.0 * kPi * shift / 64.0).total_energy() == doctest::Approx(e0).epsilon(1e-12));
  }
  for (int i = 0; i < 20; ++i) {
    const double yaw = testutil::uniform(rng, -10, 10);
    CHECK(std::abs(rotate(env, yaw).total_energy() - e0) <= 1e-3 * e0);
  }
}

TEST_CASE("rotations compose within bilinear tolerance") {
  // Smooth map: bilinear resampling error is second order in the texel size.
  const int h = 128, w = 256;
  ImageF img(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        img(x, y, c) = static_cast<float>(1.0 + 0.5 * std::sin(2 * kPi * x / w + c) * std::cos(kPi * y / h));
  const HdrEnvMap env(img);
  std::mt19937_64 rng(24);
  for (int i = 0; i < 10; ++i) {
    const double a = testutil::uniform(rng, -kPi, kPi), b = testutil::uniform(rng, -kPi, kPi);
    CHECK(max_abs_diff(rotate(rotate(env, a), b), rotate(env, a + b)) <= 1e-3);
  }
}

TEST_CASE("tonemapped and log maps commute with integer-pixel rotation") {
  std::mt19937_64 rng(25);
  const HdrEnvMap env = random_env(rng, 16);
  for (int shift : {1, 5, 16, 31}) {
    const double yaw = 2.0 * kPi * shift / 32.0;
    const LdrConditionTriple a = decompose(rotate(env, yaw));
    const LdrConditionTriple b = decompose(env);
    HdrEnvMap tm(b.tonemapped);
    CHECK(rotate(tm, yaw).radiance() == a.tonemapped);
    ImageF log3(32, 16, 3);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 32; ++x)
        for (int c = 0; c < 3; ++c) log3(x, y, c) = b.log_intensity(x, y);
    const HdrEnvMap rl = rotate(HdrEnvMap(log3), yaw);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 32; ++x) CHECK(rl(x, y, 0) == a.log_intensity(x, y));
    // The view-fixed direction map does not move.
    CHECK(a.direction == b.direction);
  }
}

TEST_CASE("intensity scaling") {
  std::mt19937_64 rng(26);
  const HdrEnvMap env = random_env(rng, 8);
  CHECK(scale_intensity(env, 1.0).radiance() == env.radiance());
  const HdrEnvMap zero = scale_intensity(env, 0.0);
  for (float v : zero.radiance().storage()) CHECK(v == 0.0f);
  const LdrConditionTriple t = decompose(scale_intensity(HdrEnvMap(16, 8, 1.0f), 2.0));
  for (float v : t.tonemapped.storage()) CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
  CHECK_ERROR_CODE(scale_intensity(env, -0.5), ErrorCode::kInvalidInput);
  CHECK_ERROR_CODE(scale_intensity(env, std::numeric_limits<double>::infinity()), ErrorCode::kInvalidInput);
}

TEST_CASE("texel solid angles cover the sphere") {
  for (int h : {32, 256}) {
    double total = 0.0;
    for (int y = 0; y < h; ++y) total += 2 * h * texel_solid_angle(y, 2 * h, h);
    CHECK(total == doctest::Approx(4 * kPi).epsilon(1e-3));
  }
}

TEST_CASE("LED on +x with zero radius lights one texel") {
  const int w = 64, h = 32;
  const HdrEnvMap map = leds_to_equirect({Led{Vec3(2.5, 0, 0), 3.0}}, w, h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool hit = x == 3 * w / 4 && y == h / 2;
      for (int c = 0; c < 3; ++c) CHECK((map(x, y, c) > 0.0f) == hit);
    }
  }
  CHECK(double(map(3 * w / 4, h / 2, 0)) * texel_solid_angle(h / 2, w, h) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("LED edge cases") {
  const HdrEnvMap none = leds_to_equirect({}, 16, 8, 2.0);
  for (float v : none.radiance().storage()) CHECK(v == 0.0f);
  try {
    leds_to_equirect({Led{Vec3(1, 0, 0), 1.0}, Led{Vec3::Zero(), 1.0}}, 16, 8, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
    CHECK(std::string(e.what()).find("LED 1") != std::string::npos);
  }
  CHECK_ERROR_CODE(leds_to_equirect({Led{Vec3(1, 0, 0), -1.0}}, 16, 8, 1.0), ErrorCode::kInvalidInput);
  CHECK_ERROR_CODE(leds_to_equirect({}, 16, 16, 1.0), ErrorCode::kInvalidInput);
  CHECK_ERROR_CODE(leds_to_equirect(LedArray(kMaxLeds + 1, Led{Vec3(1, 0, 0), 1.0}), 16, 8, 1.0),
                   ErrorCode::kInvalidInput);
}

TEST_CASE("LEDs at different elevations integrate to the same energy") {
  const int w = 256, h = 128;
  for (double radius : {0.0, 2.0, 4.0}) {
    const double el = 60.0 * kPi / 180.0;
    const HdrEnvMap low = leds_to_equirect({Led{Vec3(0, 0, -1), 1.0}}, w, h, radius);
    const HdrEnvMap high = leds_to_equirect({Led{Vec3(0, std::sin(el), -std::cos(el)), 1.0}}, w, h, radius);
    const double e_low = integrated_energy(low), e_high = integrated_energy(high);
    CAPTURE(radius);
    CHECK(std::abs(e_low - e_high) <= 0.02 * e_low);
    CHECK(e_low == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("overlapping splats sum") {
  const LedArray a{Led{Vec3(1, 0.2, 0.3), 1.5}};
  const LedArray b{Led{Vec3(1, 0.21, 0.3), 2.0}};
  LedArray both = a;
  both.push_back(b[0]);
  const HdrEnvMap ma = leds_to_equirect(a, 64, 32, 3.0), mb = leds_to_equirect(b, 64, 32, 3.0);
  const HdrEnvMap mab = leds_to_equirect(both, 64, 32, 3.0);
  for (std::size_t i = 0; i < mab.radiance().size(); ++i) {
    const double sum = double(ma.radiance().storage()[i]) + mb.radiance().storage()[i];
    CHECK(mab.radiance().storage()[i] == doctest::Approx(sum).epsilon(1e-6));
  }
}

TEST_CASE("LED splatting is linear in intensity") {
  std::mt19937_64 rng(27);
  LedArray leds;
  for (int i = 0; i < 40; ++i) {
    leds.push_back({Vec3(testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1), testutil::uniform(rng, -1, 1)),
                    testutil::uniform(rng, 0, 10)});
  }
  const HdrEnvMap base = leds_to_equirect(leds, 64, 32, 2.5);
  for (double lambda : {0.25, 2.0, 8.0, 1024.0}) {
    LedArray scaled = leds;
    for (auto& l : scaled) l.intensity *= lambda;
    const HdrEnvMap m = leds_to_equirect(scaled, 64, 32, 2.5);
    for (std::size_t i = 0; i < m.radiance().size(); ++i) {
      CHECK(m.radiance().storage()[i] == static_cast<float>(lambda * base.radiance().storage()[i]));
    }
  }
  for (double lambda : {0.3, 1.7, 13.0}) {
    LedArray scaled = leds;
    for (auto& l : scaled) l.intensity *= lambda;
    const HdrEnvMap m = leds_to_equirect(scaled, 64, 32, 2.5);
    for (std::size_t i = 0; i < m.radiance().size(); ++i) {
      CHECK(m.radiance().storage()[i] == doctest::Approx(lambda * base.radiance().storage()[i]).epsilon(1e-6));
    }
  }
}

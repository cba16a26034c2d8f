#include "lumigeo/envmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lumigeo::envmap {
namespace {

constexpr double kPi = std::numbers::pi;

void check_dims(int width, int height) {
  if (height <= 0 || width != 2 * height) {
    fail(ErrorCode::kInvalidInput, "equirectangular map must have width == 2 * height, got " +
                                       std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

HdrEnvMap::HdrEnvMap(ImageF radiance) : radiance_(std::move(radiance)) {
  check_dims(radiance_.width(), radiance_.height());
  if (radiance_.channels() != 3) fail(ErrorCode::kInvalidInput, "environment map must be RGB");
  for (float r : radiance_.data()) {
    if (!std::isfinite(r) || r < 0.0f) {
      fail(ErrorCode::kInvalidInput, "environment radiance must be finite and non-negative");
    }
  }
}

HdrEnvMap::HdrEnvMap(int width, int height, float fill) {
  check_dims(width, height);
  if (!std::isfinite(fill) || fill < 0.0f) fail(ErrorCode::kInvalidInput, "invalid fill radiance");
  radiance_ = ImageF(width, height, 3, fill);
}

double HdrEnvMap::total_energy() const {
  double sum = 0.0;
  for (float r : radiance_.data()) sum += r;
  return sum;
}

Vec3 latlong_direction(double u, double v) {
  const double phi = 2.0 * kPi * u - kPi;
  const double theta = kPi * v;
  return {std::sin(theta) * std::sin(phi), std::cos(theta), -std::sin(theta) * std::cos(phi)};
}

Vec3 pixel_direction(int x, int y, int width, int height) {
  return latlong_direction((x + 0.5) / width, (y + 0.5) / height);
}

void direction_to_latlong(const Vec3& direction, double& u, double& v) {
  const Vec3 d = direction.normalized();
  const double theta = std::acos(std::clamp(d.y(), -1.0, 1.0));
  const double phi = std::atan2(d.x(), -d.z());
  u = (phi + kPi) / (2.0 * kPi);
  v = theta / kPi;
}

double luminance(float r, float g, float b) {
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

LdrConditionTriple decompose(const HdrEnvMap& env) {
  const int w = env.width();
  const int h = env.height();
  LdrConditionTriple out{ImageF(w, h, 3), ImageF(w, h, 1), ImageF(w, h, 3)};
  double y_max = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      y_max = std::max(y_max, luminance(env(x, y, 0), env(x, y, 1), env(x, y, 2)));
    }
  }
  const double log_norm = std::log1p(y_max);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double l = env(x, y, c);
        out.tonemapped(x, y, c) = static_cast<float>(l / (1.0 + l));
      }
      const double lum = luminance(env(x, y, 0), env(x, y, 1), env(x, y, 2));
      out.log_intensity(x, y) = y_max > 0.0 ? static_cast<float>(std::log1p(lum) / log_norm) : 0.0f;
      const Vec3 d = pixel_direction(x, y, w, h);
      for (int c = 0; c < 3; ++c) out.direction(x, y, c) = static_cast<float>((d[c] + 1.0) / 2.0);
    }
  }
  return out;
}

HdrEnvMap rotate(const HdrEnvMap& env, double yaw) {
  if (!std::isfinite(yaw)) fail(ErrorCode::kInvalidInput, "yaw must be finite");
  const int w = env.width();
  const int h = env.height();
  double shift = std::fmod(yaw / (2.0 * kPi) * w, static_cast<double>(w));
  if (shift < 0.0) shift += w;
  // Yaws computed as 2*pi*k/W land a few ulps off the integer shift.
  if (std::abs(shift - std::round(shift)) < 1e-9) shift = std::round(shift);
  if (shift >= w) shift -= w;
  int whole = static_cast<int>(std::floor(shift));
  const double frac = shift - whole;
  whole %= w;

  HdrEnvMap out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int src0 = ((x - whole) % w + w) % w;
      const int src1 = (src0 - 1 + w) % w;
      for (int c = 0; c < 3; ++c) {
        if (frac == 0.0) {
          out(x, y, c) = env(src0, y, c);
        } else {
          out(x, y, c) = static_cast<float>((1.0 - frac) * env(src0, y, c) + frac * env(src1, y, c));
        }
      }
    }
  }
  return out;
}

HdrEnvMap scale_intensity(const HdrEnvMap& env, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    fail(ErrorCode::kInvalidInput, "intensity factor must be finite and non-negative");
  }
  ImageF scaled = env.radiance();
  for (float& r : scaled.storage()) r = static_cast<float>(r * factor);
  return HdrEnvMap(std::move(scaled));
}

double texel_solid_angle(int y, int width, int height) {
  const double theta = kPi * (y + 0.5) / height;
  return (2.0 * kPi / width) * (kPi / height) * std::sin(theta);
}

HdrEnvMap leds_to_equirect(const LedArray& leds, int width, int height, double splat_radius) {
  check_dims(width, height);
  if (leds.size() > kMaxLeds) {
    fail(ErrorCode::kInvalidInput, "at most " + std::to_string(kMaxLeds) + " LEDs are supported");
  }
  if (!(splat_radius >= 0.0) || !std::isfinite(splat_radius)) {
    fail(ErrorCode::kInvalidInput, "splat radius must be finite and non-negative");
  }
  Raster<double> accum(width, height);
  const int reach = static_cast<int>(std::floor(splat_radius));
  const double sigma = splat_radius / 2.0;

  struct Tap {
    int x, y;
    double weight;
  };
  std::vector<Tap> taps;
  for (std::size_t i = 0; i < leds.size(); ++i) {
    const Led& led = leds[i];
    if (!led.position.allFinite() || led.position.norm() == 0.0) {
      fail(ErrorCode::kInvalidInput, "LED " + std::to_string(i) + " has no well-defined direction");
    }
    if (!(led.intensity >= 0.0) || !std::isfinite(led.intensity)) {
      fail(ErrorCode::kInvalidInput, "LED " + std::to_string(i) + " has a negative intensity");
    }
    double u = 0.0, v = 0.0;
    direction_to_latlong(led.position, u, v);
    const int cx = std::min(static_cast<int>(std::floor(u * width)), width - 1);
    const int cy = std::min(static_cast<int>(std::floor(v * height)), height - 1);

    taps.clear();
    double total = 0.0;
    for (int dy = -reach; dy <= reach; ++dy) {
      const int y = cy + dy;
      if (y < 0 || y >= height) continue;
      for (int dx = -reach; dx <= reach; ++dx) {
        const double r2 = static_cast<double>(dx * dx + dy * dy);
        if (r2 > splat_radius * splat_radius) continue;
        const double wgt = sigma > 0.0 ? std::exp(-r2 / (2.0 * sigma * sigma)) : 1.0;
        taps.push_back({((cx + dx) % width + width) % width, y, wgt});
        total += wgt;
      }
    }
    for (const Tap& t : taps) {
      accum(t.x, t.y) += led.intensity * (t.weight / total) / texel_solid_angle(t.y, width, height);
    }
  }

  HdrEnvMap out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float value = static_cast<float>(accum(x, y));
      for (int c = 0; c < 3; ++c) out(x, y, c) = value;
    }
  }
  return out;
}

}  // namespace lumigeo::envmap

#pragma once

// Equirectangular HDR illumination: the three LDR conditioning maps, yaw
// rotation, intensity scaling, and light-stage LED splatting.
//
// Latlong convention: pixel (i, j) has its center at u = (i + 0.5) / W,
// v = (j + 0.5) / H; azimuth phi = 2*pi*u - pi, polar theta = pi*v, and the
// direction is (sin(theta) sin(phi), cos(theta), -sin(theta) cos(phi)).
// +y is up and the map center looks down -z; +x lands at u = 3/4.

#include <vector>

#include "lumigeo/point_cloud.hpp"
#include "lumigeo/raster.hpp"

namespace lumigeo::envmap {

/// Linear RGB radiance, width == 2 * height, all values finite and >= 0.
class HdrEnvMap {
 public:
  HdrEnvMap() = default;
  explicit HdrEnvMap(ImageF radiance);
  HdrEnvMap(int width, int height, float fill = 0.0f);

  int width() const noexcept { return radiance_.width(); }
  int height() const noexcept { return radiance_.height(); }
  const ImageF& radiance() const noexcept { return radiance_; }
  float operator()(int x, int y, int c) const noexcept { return radiance_(x, y, c); }
  float& operator()(int x, int y, int c) noexcept { return radiance_(x, y, c); }

  double total_energy() const;

 private:
  ImageF radiance_;
};

struct LdrConditionTriple {
  ImageF tonemapped;     ///< RGB, Reinhard L / (1 + L)
  ImageF log_intensity;  ///< 1 channel, log(1 + Y) / log(1 + Y_max)
  ImageF direction;      ///< RGB, (d + 1) / 2
};

struct Led {
  Vec3 position = Vec3::Zero();
  double intensity = 0.0;
};

using LedArray = std::vector<Led>;

inline constexpr std::size_t kMaxLeds = 1024;

/// Unit direction through the latlong coordinate (u, v), both in [0, 1].
Vec3 latlong_direction(double u, double v);
/// Unit direction through the center of pixel (x, y).
Vec3 pixel_direction(int x, int y, int width, int height);
/// Continuous latlong coordinate of a (not necessarily unit) direction.
void direction_to_latlong(const Vec3& direction, double& u, double& v);

double luminance(float r, float g, float b);

LdrConditionTriple decompose(const HdrEnvMap& env);

/// Circular horizontal shift by yaw / (2 pi) * width pixels, linear
/// interpolation between the two nearest columns for fractional shifts.
HdrEnvMap rotate(const HdrEnvMap& env, double yaw);

HdrEnvMap scale_intensity(const HdrEnvMap& env, double factor);

/// Deposits each LED as a white Gaussian splat (sigma = radius / 2, unit-sum
/// kernel) and divides by the texel solid angle, so the map integrates to the
/// sum of intensities regardless of elevation.
HdrEnvMap leds_to_equirect(const LedArray& leds, int width, int height, double splat_radius);

/// Solid angle of one texel in row y.
double texel_solid_angle(int y, int width, int height);

}  // namespace lumigeo::envmap

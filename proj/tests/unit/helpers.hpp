#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <doctest.h>

#include "lumigeo/error.hpp"
#include "lumigeo/point_cloud.hpp"
#include "lumigeo/raster.hpp"

namespace testutil {

using lumigeo::ErrorCode;

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline lumigeo::ImageF random_image(std::mt19937_64& rng, int w, int h, int c, double lo = 0.0, double hi = 1.0) {
  lumigeo::ImageF img(w, h, c);
  for (auto& v : img.storage()) v = static_cast<float>(uniform(rng, lo, hi));
  return img;
}

inline lumigeo::PointCloud random_cloud(std::mt19937_64& rng, int n, double scale = 1.0) {
  lumigeo::PointCloud cloud;
  for (int i = 0; i < n; ++i) {
    cloud.points.emplace_back(uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale));
  }
  return cloud;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lumigeo_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename F>
ErrorCode error_code_of(F&& fn) {
  try {
    fn();
  } catch (const lumigeo::Error& e) {
    return e.code();
  }
  FAIL("expected lumigeo::Error");
  return ErrorCode::kNumeric;
}

}  // namespace testutil

#define CHECK_ERROR_CODE(expr, code) CHECK(testutil::error_code_of([&] { (void)(expr); }) == (code))

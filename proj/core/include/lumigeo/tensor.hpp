#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lumigeo/raster.hpp"

namespace lumigeo {

/// Dense row-major float tensor; the in-memory twin of a GRLT file.
struct Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  static std::size_t element_count(const std::vector<std::uint32_t>& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// H x W x C raster as a rank-3 tensor and back.
Tensor to_tensor(const Raster<float>& raster);
Raster<float> to_raster(const Tensor& tensor);

}  // namespace lumigeo

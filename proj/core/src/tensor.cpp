#include "lumigeo/tensor.hpp"

#include <string>

namespace lumigeo {

Tensor to_tensor(const Raster<float>& raster) {
  return Tensor{{static_cast<std::uint32_t>(raster.height()), static_cast<std::uint32_t>(raster.width()),
                 static_cast<std::uint32_t>(raster.channels())},
                raster.storage()};
}

Raster<float> to_raster(const Tensor& tensor) {
  if (tensor.shape.size() != 3) {
    fail(ErrorCode::kInvalidInput,
         "expected a rank-3 H x W x C tensor, got rank " + std::to_string(tensor.shape.size()));
  }
  Raster<float> raster(static_cast<int>(tensor.shape[1]), static_cast<int>(tensor.shape[0]),
                       static_cast<int>(tensor.shape[2]));
  if (tensor.data.size() != raster.size()) {
    fail(ErrorCode::kInvalidInput, "tensor data length does not match its shape");
  }
  raster.storage() = tensor.data;
  return raster;
}

}  // namespace lumigeo

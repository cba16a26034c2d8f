#pragma once

// File formats. Every reader/writer throws Error{kIo} on filesystem trouble
// or malformed content.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "lumigeo/diffusion.hpp"
#include "lumigeo/envmap.hpp"
#include "lumigeo/inod.hpp"
#include "lumigeo/latent.hpp"
#include "lumigeo/point_cloud.hpp"
#include "lumigeo/raster.hpp"
#include "lumigeo/tensor.hpp"

namespace lumigeo::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Portable float map, 1 ("Pf") or 3 ("PF") channels. Writes little-endian
/// with rows bottom-to-top as the format requires; reads either byte order.
ImageF read_pfm(const fs::path& path);
void write_pfm(const fs::path& path, const ImageF& image);

/// 8-bit binary PGM; nonzero reads as set, set writes as 255.
Mask read_pgm_mask(const fs::path& path);
void write_pgm_mask(const fs::path& path, const Mask& mask);

/// 8-bit gray or RGB PNG of an image clamped to [0, 1]. For inspection only.
void write_png(const fs::path& path, const ImageF& image);

/// Radiance RGBE. Reads flat and run-length encoded scanlines; writes RLE.
ImageF read_hdr(const fs::path& path);
void write_hdr(const fs::path& path, const ImageF& image);

/// Binary little-endian PLY with float x, y, z and optional uint u, v.
PointCloud read_ply(const fs::path& path);
void write_ply(const fs::path& path, const PointCloud& cloud);

/// "GRLT" magic, u32 rank, u32 dims[rank], little-endian f32 row-major data.
Tensor read_tensor(const fs::path& path);
void write_tensor(const fs::path& path, const Tensor& tensor);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& value);

// JSON mappings. from_json functions throw Error{kInvalidInput} on schema
// violations.
json to_json(const inod::IntrinsicsMatrix& k);
inod::IntrinsicsMatrix intrinsics_from_json(const json& j);
json to_json(const inod::NormalizationRecord& record);
inod::NormalizationRecord normalization_from_json(const json& j);
json to_json(const inod::OrthoGrid& grid);
inod::OrthoGrid grid_from_json(const json& j);
json to_json(const envmap::LedArray& leds);
envmap::LedArray leds_from_json(const json& j);
json to_json(const latent::TrainingModeSpec& spec);
json to_json(const latent::ModalityTypeTable& table);
latent::ModalityTypeTable modality_table_from_json(const json& j);
diffusion::NoiseSchedule schedule_from_json(const json& j);

/// Depth map from a PFM plus optional PGM mask (mask defaults to finite,
/// positive depth).
inod::DepthMap read_depth(const fs::path& depth_path, const fs::path& mask_path = {});

}  // namespace lumigeo::io

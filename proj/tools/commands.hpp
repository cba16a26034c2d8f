#pragma once

// Subcommand adapters. Each takes its parsed options, does file I/O around a
// single library call chain, and returns the JSON result line.

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace lumigeo::cli {

using nlohmann::json;

struct InodEncodeOptions {
  std::string depth, mask, intrinsics, out, out_mask, meta;
  int dilate = 0;
};
struct InodDecodeOptions {
  std::string map, mask, meta, out;
  bool metric = false;
};
struct InodDilateOptions {
  std::string map, mask, meta, out, out_dilated;
  int radius = 2;
};
struct InodRoundtripOptions {
  std::string depth, mask, intrinsics, out;
};

struct EnvDecomposeOptions {
  std::string hdr, out_dir;
};
struct EnvRotateOptions {
  std::string hdr, out;
  double yaw = 0.0;
};
struct EnvScaleOptions {
  std::string hdr, out;
  double factor = 1.0;
};
struct EnvFromLedsOptions {
  std::string leds, out, size = "512x256";
  double splat_radius = 2.0;
};

struct AssembleOptions {
  std::string latents, global, illumination, mode, dataset, clear, table, out;
};
struct SampleOptions {
  std::string latents, latent_size, global, illumination, mode, dataset, clear, table, schedule, out;
  std::string denoiser = "shrink";
  int steps = 35;
  double sigma_min = 0.002, sigma_max = 80.0, rho = 7.0;
  std::uint64_t seed = 0;
};

struct EvalGeometryOptions {
  std::string pred, gt, out;
  double threshold = 0.05;
  int icp_iters = 50;
  double icp_tol = 1e-10;
};
struct EvalRelightOptions {
  std::string pred, gt, mask, out;
  bool no_align = false;
};
struct EvalNormalOptions {
  std::string pred, gt, mask, out;
  bool unit_encoded = false;
};

struct BenchDilationOptions {
  std::string corpus, save_corpus, out;
  int generate = 0;
  int radius = 2;
  int band = 3;
  std::uint64_t seed = 1;
};

struct SynthSceneOptions {
  std::string shape = "sphere", projection = "near", size = "128x128", out, out_mask, out_intrinsics;
  double depth_to_height = 1.0;
  std::uint64_t seed = 0;
};

json inod_encode(const InodEncodeOptions& o);
json inod_decode(const InodDecodeOptions& o);
json inod_dilate(const InodDilateOptions& o);
json inod_roundtrip(const InodRoundtripOptions& o);
json envmap_decompose(const EnvDecomposeOptions& o);
json envmap_rotate(const EnvRotateOptions& o);
json envmap_scale(const EnvScaleOptions& o);
json envmap_from_leds(const EnvFromLedsOptions& o);
json assemble(const AssembleOptions& o);
json sample(const SampleOptions& o);
json eval_geometry(const EvalGeometryOptions& o);
json eval_relight(const EvalRelightOptions& o);
json eval_normal(const EvalNormalOptions& o);
json bench_dilation(const BenchDilationOptions& o);
json synth_scene(const SynthSceneOptions& o);

/// Finite doubles as numbers, infinities as "inf" / "-inf", NaN as null.
json number(double v);

/// Relative output paths land under $LUMIGEO_OUTPUT_DIR when it is set.
std::string output_path(const std::string& path);

}  // namespace lumigeo::cli

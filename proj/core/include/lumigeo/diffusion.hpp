#pragma once

// Denoiser-agnostic reverse sampling over the modality stack, condition
// dropping for ablations, and a block-mean stand-in for the image VAE.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lumigeo/inod.hpp"
#include "lumigeo/latent.hpp"

namespace lumigeo::diffusion {

using latent::LatentTensor;
using latent::ModalitySet;

/// Strictly decreasing noise levels ending in exactly 0.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> sigmas);

  /// Karras et al. spacing: `steps` positive levels from sigma_max down to
  /// sigma_min, then 0.
  static NoiseSchedule karras(int steps = 35, double sigma_min = 0.002, double sigma_max = 80.0,
                              double rho = 7.0);

  const std::vector<double>& sigmas() const noexcept { return sigmas_; }
  int steps() const noexcept { return static_cast<int>(sigmas_.size()) - 1; }
  double initial() const noexcept { return sigmas_.front(); }

 private:
  std::vector<double> sigmas_;
};

/// Maps the assembled stack and a noise level to a denoised estimate of all
/// five 16-channel latents.
using Denoiser = std::function<std::vector<LatentTensor>(const latent::ModalityStack&, double sigma)>;

struct SamplerState {
  std::vector<LatentTensor> latents;
  ModalitySet clear{};
  int step = 0;
};

struct DropSet {
  bool global = false;
  bool illumination = false;
  bool latent = false;  ///< the slice's own latent block (geometry ablation)
};

struct SamplerOptions {
  latent::ModalityTypeTable table;
  /// Modalities whose latents are replaced by zero tensors before each step
  /// and never updated ("w/o geometry" style ablations).
  ModalitySet zeroed{};
  /// Called with the initial state and after every step.
  std::function<void(const SamplerState&)> observer;
};

/// Deterministic first-order EDM sampling. Clear modalities are never
/// touched; noisy ones follow x += (s_next - s) * (x - D(x; s)) / s.
std::vector<LatentTensor> sample(std::vector<LatentTensor> initial, const ModalitySet& clear,
                                 const latent::Conditions& conditions, const NoiseSchedule& schedule,
                                 const Denoiser& denoiser, const SamplerOptions& options = {});

/// Standard normal sample that depends only on (seed, stream, index).
float gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Starting latents: clean values for clear modalities, sigma0-scaled noise
/// keyed by (seed, modality, element) for the rest. `clean` may hold empty
/// rasters for noisy modalities.
std::vector<LatentTensor> initial_latents(const std::vector<LatentTensor>& clean, const ModalitySet& clear,
                                          std::uint64_t seed, double sigma0, int height, int width);

/// Overwrites the named blocks of a slice with exact zeros.
latent::ConditionSlice drop_to_zero(latent::ConditionSlice slice, const DropSet& blocks);

// ---------------------------------------------------------------------------
// Mock codec and the boundary experiment built on it.

inline constexpr int kMockBlock = 8;

/// 8x8 block-mean downsample followed by bilinear upsample (pixel-center
/// aligned, edge-clamped). Works per channel; width and height must be
/// multiples of 8.
ImageF mock_vae_roundtrip(const ImageF& image);

/// Foreground pixels within `width` (Chebyshev) of a background pixel.
Mask boundary_band(const Mask& mask, int width = 3);

struct DilationTrial {
  double plain_error = 0.0;    ///< mean |z error| on the band without dilation
  double dilated_error = 0.0;  ///< same, with dilation before the codec
  std::size_t band_pixels = 0;
};

/// Runs the map through mock codec + cutoff with and without dilation and
/// measures the boundary-band error of each against the original map.
DilationTrial dilation_trial(const inod::INodMap& map, int radius, int band_width = 3);

}  // namespace lumigeo::diffusion

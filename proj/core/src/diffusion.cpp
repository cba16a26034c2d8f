#include "lumigeo/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lumigeo::diffusion {
namespace {

using latent::kLatentChannels;
using latent::kModalityCount;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// (0, 1] from the top 53 bits.
double unit_open_closed(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

bool all_finite(const LatentTensor& t) {
  return std::all_of(t.storage().begin(), t.storage().end(), [](float v) { return std::isfinite(v); });
}

void check_latents(const std::vector<LatentTensor>& latents, int height, int width, const char* what) {
  if (latents.size() != kModalityCount) {
    fail(ErrorCode::kInvalidInput, std::string(what) + ": expected one latent per modality");
  }
  for (int m = 0; m < kModalityCount; ++m) {
    const auto& t = latents[m];
    if (t.height() != height || t.width() != width || t.channels() != kLatentChannels) {
      fail(ErrorCode::kInvalidInput, std::string(what) + ": latent for " +
                                         std::string(latent::to_string(static_cast<latent::ModalityId>(m))) +
                                         " has the wrong shape");
    }
  }
}

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> sigmas) : sigmas_(std::move(sigmas)) {
  if (sigmas_.size() < 2) fail(ErrorCode::kInvalidInput, "a noise schedule needs at least two levels");
  if (sigmas_.back() != 0.0) fail(ErrorCode::kInvalidInput, "a noise schedule must end at sigma = 0");
  for (std::size_t i = 0; i + 1 < sigmas_.size(); ++i) {
    if (!std::isfinite(sigmas_[i]) || !(sigmas_[i] > sigmas_[i + 1])) {
      fail(ErrorCode::kInvalidInput, "noise levels must be finite and strictly decreasing (index " +
                                         std::to_string(i) + ")");
    }
  }
}

NoiseSchedule NoiseSchedule::karras(int steps, double sigma_min, double sigma_max, double rho) {
  if (steps < 1) fail(ErrorCode::kInvalidInput, "schedule needs at least one step");
  if (!(sigma_min > 0.0) || !(sigma_max > sigma_min) || !(rho > 0.0)) {
    fail(ErrorCode::kInvalidInput, "invalid Karras schedule parameters");
  }
  std::vector<double> sigmas;
  const double hi = std::pow(sigma_max, 1.0 / rho);
  const double lo = std::pow(sigma_min, 1.0 / rho);
  for (int i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    sigmas.push_back(std::pow(hi + t * (lo - hi), rho));
  }
  sigmas.push_back(0.0);
  return NoiseSchedule(std::move(sigmas));
}

std::vector<LatentTensor> sample(std::vector<LatentTensor> initial, const ModalitySet& clear,
                                 const latent::Conditions& conditions, const NoiseSchedule& schedule,
                                 const Denoiser& denoiser, const SamplerOptions& options) {
  if (initial.size() != kModalityCount) {
    fail(ErrorCode::kInvalidInput, "sample: expected one initial latent per modality");
  }
  const int h = initial[0].height();
  const int w = initial[0].width();
  check_latents(initial, h, w, "sample");
  for (int m = 0; m < kModalityCount; ++m) {
    if (!all_finite(initial[m])) fail(ErrorCode::kInvalidInput, "sample: initial latents must be finite");
  }

  SamplerState state{std::move(initial), clear, 0};
  for (int m = 0; m < kModalityCount; ++m) {
    if (options.zeroed[m]) state.latents[m] = LatentTensor(w, h, kLatentChannels, 0.0f);
  }
  if (options.observer) options.observer(state);

  const auto& sigmas = schedule.sigmas();
  for (int i = 0; i < schedule.steps(); ++i) {
    const latent::ModalityStack stack = latent::assemble_stack(state.latents, conditions, clear, options.table);
    const std::vector<LatentTensor> denoised = denoiser(stack, sigmas[i]);
    check_latents(denoised, h, w, "denoiser output");
    // Ratio first: on the final (sigma, 0) step it is exactly -1, so the
    // update lands exactly on the denoised estimate.
    const double ratio = (sigmas[i + 1] - sigmas[i]) / sigmas[i];
    for (int m = 0; m < kModalityCount; ++m) {
      if (clear[m] || options.zeroed[m]) continue;
      if (!all_finite(denoised[m])) {
        fail(ErrorCode::kNumeric, "denoiser returned non-finite values at step " + std::to_string(i) +
                                      " for " + std::string(latent::to_string(static_cast<latent::ModalityId>(m))));
      }
      auto& x = state.latents[m].storage();
      const auto& d = denoised[m].storage();
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double xv = x[k];
        x[k] = static_cast<float>(xv + ratio * (xv - static_cast<double>(d[k])));
      }
      if (!all_finite(state.latents[m])) {
        fail(ErrorCode::kNumeric, "latent diverged at step " + std::to_string(i));
      }
    }
    state.step = i + 1;
    if (options.observer) options.observer(state);
  }
  return std::move(state.latents);
}

float gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ index);
  const double u1 = unit_open_closed(h);
  const double u2 = unit_open_closed(splitmix64(h));
  return static_cast<float>(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2));
}

std::vector<LatentTensor> initial_latents(const std::vector<LatentTensor>& clean, const ModalitySet& clear,
                                          std::uint64_t seed, double sigma0, int height, int width) {
  if (clean.size() != kModalityCount) {
    fail(ErrorCode::kInvalidInput, "initial_latents: expected one entry per modality");
  }
  std::vector<LatentTensor> out;
  out.reserve(kModalityCount);
  for (int m = 0; m < kModalityCount; ++m) {
    if (clear[m]) {
      const auto& c = clean[m];
      if (c.height() != height || c.width() != width || c.channels() != kLatentChannels) {
        fail(ErrorCode::kInvalidInput, "clear modality " +
                                           std::string(latent::to_string(static_cast<latent::ModalityId>(m))) +
                                           " needs a clean latent of the sampling shape");
      }
      out.push_back(c);
      continue;
    }
    LatentTensor noise(width, height, kLatentChannels);
    auto& data = noise.storage();
    for (std::size_t k = 0; k < data.size(); ++k) {
      data[k] = static_cast<float>(sigma0 * gaussian_noise(seed, static_cast<std::uint64_t>(m), k));
    }
    out.push_back(std::move(noise));
  }
  return out;
}

latent::ConditionSlice drop_to_zero(latent::ConditionSlice slice, const DropSet& blocks) {
  auto zero = [&](int offset, int count) {
    for (int y = 0; y < slice.channels.height(); ++y) {
      for (int x = 0; x < slice.channels.width(); ++x) {
        for (int c = 0; c < count; ++c) slice.channels(x, y, offset + c) = 0.0f;
      }
    }
  };
  if (slice.channels.channels() != latent::kStackChannels) {
    fail(ErrorCode::kInvalidInput, "drop_to_zero expects an 84-channel slice");
  }
  if (blocks.latent) zero(latent::kLatentOffset, latent::kLatentChannels);
  if (blocks.global) zero(latent::kGlobalOffset, latent::kGlobalChannels);
  if (blocks.illumination) zero(latent::kIlluminationOffset, latent::kIlluminationChannels);
  return slice;
}

ImageF mock_vae_roundtrip(const ImageF& image) {
  const int w = image.width();
  const int h = image.height();
  const int ch = image.channels();
  if (w % kMockBlock != 0 || h % kMockBlock != 0 || w == 0 || h == 0) {
    fail(ErrorCode::kInvalidInput, "mock codec needs dimensions that are nonzero multiples of 8, got " +
                                       std::to_string(w) + "x" + std::to_string(h));
  }
  const int cw = w / kMockBlock;
  const int chh = h / kMockBlock;
  Raster<double> coarse(cw, chh, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) coarse(x / kMockBlock, y / kMockBlock, c) += image(x, y, c);
    }
  }
  for (double& v : coarse.storage()) v /= kMockBlock * kMockBlock;

  // Coarse sample i sits at fine coordinate (i + 0.5) * 8.
  auto sample_pos = [](int fine, int coarse_len, int& i0, int& i1, double& t) {
    const double g = (fine + 0.5) / kMockBlock - 0.5;
    const double f = std::floor(g);
    t = g - f;
    i0 = std::clamp(static_cast<int>(f), 0, coarse_len - 1);
    i1 = std::clamp(static_cast<int>(f) + 1, 0, coarse_len - 1);
  };
  ImageF out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    int y0, y1;
    double ty;
    sample_pos(y, chh, y0, y1, ty);
    for (int x = 0; x < w; ++x) {
      int x0, x1;
      double tx;
      sample_pos(x, cw, x0, x1, tx);
      for (int c = 0; c < ch; ++c) {
        const double top = (1.0 - tx) * coarse(x0, y0, c) + tx * coarse(x1, y0, c);
        const double bottom = (1.0 - tx) * coarse(x0, y1, c) + tx * coarse(x1, y1, c);
        out(x, y, c) = static_cast<float>((1.0 - ty) * top + ty * bottom);
      }
    }
  }
  return out;
}

Mask boundary_band(const Mask& mask, int width) {
  Mask band(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      bool near_background = false;
      for (int dy = -width; dy <= width && !near_background; ++dy) {
        for (int dx = -width; dx <= width; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (mask.in_bounds(nx, ny) && !mask(nx, ny)) {
            near_background = true;
            break;
          }
        }
      }
      band(x, y) = near_background;
    }
  }
  return band;
}

DilationTrial dilation_trial(const inod::INodMap& map, int radius, int band_width) {
  const Mask band = boundary_band(map.mask, band_width);
  auto band_error = [&](const inod::INodMap& encoded) {
    inod::INodMap decoded = encoded;
    decoded.values = mock_vae_roundtrip(encoded.values);
    const inod::INodMap clean = inod::cutoff(decoded, map.mask);
    double sum = 0.0;
    for (int y = 0; y < map.height(); ++y) {
      for (int x = 0; x < map.width(); ++x) {
        if (band(x, y)) sum += std::abs(static_cast<double>(clean.values(x, y)) - map.values(x, y));
      }
    }
    return sum;
  };
  DilationTrial trial;
  trial.band_pixels = count_set(band);
  if (trial.band_pixels == 0) return trial;
  trial.plain_error = band_error(map) / trial.band_pixels;
  trial.dilated_error = band_error(inod::dilate_foreground(map, radius)) / trial.band_pixels;
  return trial;
}

}  // namespace lumigeo::diffusion

#include "lumigeo/latent.hpp"

#include <algorithm>
#include <cmath>

namespace lumigeo::latent {
namespace {

constexpr ModalitySet set_of(std::initializer_list<ModalityId> members) {
  ModalitySet s{};
  for (auto m : members) s[ordinal(m)] = true;
  return s;
}

constexpr ModalitySet complement(const ModalitySet& s) {
  ModalitySet out{};
  for (int i = 0; i < kModalityCount; ++i) out[i] = !s[i];
  return out;
}

using enum ModalityId;

void require_latent(const LatentTensor& t, int height, int width, int channels, std::string_view what) {
  if (t.height() != height || t.width() != width || t.channels() != channels) {
    fail(ErrorCode::kInvalidInput,
         std::string(what) + ": expected " + std::to_string(height) + "x" + std::to_string(width) +
             "x" + std::to_string(channels) + ", got " + std::to_string(t.height()) + "x" +
             std::to_string(t.width()) + "x" + std::to_string(t.channels()));
  }
}

void copy_block(const LatentTensor& src, Raster<float>& dst, int offset) {
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < src.channels(); ++c) dst(x, y, offset + c) = src(x, y, c);
    }
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

ImageF replicate_to_rgb(const ImageF& image) {
  if (image.channels() == 3) return image;
  if (image.channels() != 1) fail(ErrorCode::kInvalidInput, "expected a 1- or 3-channel image");
  ImageF out(image.width(), image.height(), 3);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < 3; ++c) out(x, y, c) = image(x, y, 0);
  return out;
}

std::string_view to_string(ModalityId m) {
  switch (m) {
    case kAlbedo: return "albedo";
    case kNormal: return "normal";
    case kGeometry: return "geometry";
    case kSegmentation: return "segmentation";
    case kRelit: return "relit";
  }
  return "unknown";
}

ModalityId parse_modality(std::string_view name) {
  const std::string n = lower(name);
  if (n == "a" || n == "albedo") return kAlbedo;
  if (n == "n" || n == "normal") return kNormal;
  if (n == "g" || n == "geometry" || n == "inod") return kGeometry;
  if (n == "s" || n == "segmentation") return kSegmentation;
  if (n == "r" || n == "ie" || n == "i_e" || n == "relit") return kRelit;
  fail(ErrorCode::kInvalidInput, "unknown modality '" + std::string(name) + "'");
}

ModalityStack::ModalityStack(int height, int width)
    : height_(height),
      width_(width),
      data_(static_cast<std::size_t>(kModalityCount) * height * width * kStackChannels, 0.0f) {}

ConditionSlice ModalityStack::slice(ModalityId m) const {
  ConditionSlice s{m, Raster<float>(width_, height_, kStackChannels)};
  const auto first = data_.begin() + static_cast<std::ptrdiff_t>(index(ordinal(m), 0, 0, 0));
  std::copy(first, first + static_cast<std::ptrdiff_t>(s.channels.size()), s.channels.storage().begin());
  return s;
}

Tensor ModalityStack::to_tensor() const {
  return Tensor{{kModalityCount, static_cast<std::uint32_t>(height_), static_cast<std::uint32_t>(width_),
                 kStackChannels},
                data_};
}

ModalityStack ModalityStack::from_tensor(const Tensor& tensor) {
  if (tensor.shape.size() != 4 || tensor.shape[0] != kModalityCount || tensor.shape[3] != kStackChannels) {
    fail(ErrorCode::kInvalidInput, "expected a 5 x H x W x 84 stack tensor");
  }
  ModalityStack stack(static_cast<int>(tensor.shape[1]), static_cast<int>(tensor.shape[2]));
  if (tensor.data.size() != stack.data_.size()) {
    fail(ErrorCode::kInvalidInput, "stack tensor data length does not match its shape");
  }
  stack.data_ = tensor.data;
  return stack;
}

ModalityTypeTable::ModalityTypeTable() {
  for (int m = 0; m < kModalityCount; ++m) {
    const int code = m + 1;
    rows_[m] = {static_cast<float>((code >> 2) & 1), static_cast<float>((code >> 1) & 1),
                static_cast<float>(code & 1)};
  }
}

ModalityTypeTable::ModalityTypeTable(const std::array<Row, kModalityCount>& rows) : rows_(rows) {
  for (const auto& r : rows_) {
    for (float v : r) {
      if (!std::isfinite(v)) fail(ErrorCode::kInvalidInput, "modality type table has a non-finite entry");
    }
  }
  for (int i = 0; i < kModalityCount; ++i) {
    for (int j = i + 1; j < kModalityCount; ++j) {
      if (rows_[i] == rows_[j]) {
        fail(ErrorCode::kInvalidInput, "modality type rows " + std::to_string(i) + " and " +
                                           std::to_string(j) + " are identical");
      }
    }
  }
}

LatentTensor concat_illumination(const LatentTensor& ldr, const LatentTensor& log_intensity,
                                 const LatentTensor& direction) {
  require_latent(ldr, ldr.height(), ldr.width(), kLatentChannels, "illumination ldr latent");
  require_latent(log_intensity, ldr.height(), ldr.width(), kLatentChannels, "illumination log latent");
  require_latent(direction, ldr.height(), ldr.width(), kLatentChannels, "illumination dir latent");
  LatentTensor out(ldr.width(), ldr.height(), kIlluminationChannels);
  copy_block(ldr, out, 0);
  copy_block(log_intensity, out, kLatentChannels);
  copy_block(direction, out, 2 * kLatentChannels);
  return out;
}

ConditionSlice assemble(const LatentTensor& noisy, const LatentTensor* global_condition,
                        const LatentTensor* illumination, ModalityId modality, bool clear,
                        const ModalityTypeTable& table) {
  const int h = noisy.height();
  const int w = noisy.width();
  require_latent(noisy, h, w, kLatentChannels, "noisy latent");
  if (global_condition) require_latent(*global_condition, h, w, kGlobalChannels, "global condition");
  if (illumination) {
    if (modality != kRelit) {
      fail(ErrorCode::kInvalidInput, "illumination condition only attaches to the relit modality, not " +
                                         std::string(to_string(modality)));
    }
    require_latent(*illumination, h, w, kIlluminationChannels, "illumination condition");
  }

  ConditionSlice slice{modality, Raster<float>(w, h, kStackChannels, 0.0f)};
  copy_block(noisy, slice.channels, kLatentOffset);
  if (global_condition) copy_block(*global_condition, slice.channels, kGlobalOffset);
  if (illumination) copy_block(*illumination, slice.channels, kIlluminationOffset);
  const auto& row = table.row(modality);
  const float switch_value = clear ? 1.0f : 0.0f;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < kTypeChannels; ++c) slice.channels(x, y, kTypeOffset + c) = row[c];
      slice.channels(x, y, kSwitchOffset) = switch_value;
    }
  }
  return slice;
}

ModalityStack stack_modalities(std::span<const ConditionSlice> slices) {
  if (slices.size() != kModalityCount) {
    fail(ErrorCode::kInvalidInput, "expected " + std::to_string(kModalityCount) + " modality slices, got " +
                                       std::to_string(slices.size()));
  }
  const int h = slices[0].channels.height();
  const int w = slices[0].channels.width();
  ModalityStack stack(h, w);
  for (int m = 0; m < kModalityCount; ++m) {
    const auto& s = slices[m];
    if (ordinal(s.modality) != m) {
      fail(ErrorCode::kInvalidInput, "slice " + std::to_string(m) + " holds modality '" +
                                         std::string(to_string(s.modality)) +
                                         "'; slices must be one per modality in ordinal order");
    }
    require_latent(s.channels, h, w, kStackChannels, "condition slice");
    std::copy(s.channels.storage().begin(), s.channels.storage().end(),
              stack.data().begin() + static_cast<std::ptrdiff_t>(stack.index(m, 0, 0, 0)));
  }
  return stack;
}

ModalityStack assemble_stack(std::span<const LatentTensor> latents, const Conditions& conditions,
                             const std::array<bool, kModalityCount>& clear,
                             const ModalityTypeTable& table) {
  if (latents.size() != kModalityCount) {
    fail(ErrorCode::kInvalidInput, "expected one latent per modality");
  }
  std::vector<ConditionSlice> slices;
  slices.reserve(kModalityCount);
  for (ModalityId m : kAllModalities) {
    const LatentTensor* illum =
        (m == kRelit && conditions.illumination) ? &*conditions.illumination : nullptr;
    const LatentTensor* global = conditions.global ? &*conditions.global : nullptr;
    slices.push_back(assemble(latents[ordinal(m)], global, illum, m, clear[ordinal(m)], table));
  }
  return stack_modalities(slices);
}

std::vector<float> apply_rope_2d(std::span<const float> features, int dim,
                                 std::span<const Position2d> positions, double base) {
  if (dim <= 0 || dim % 4 != 0) {
    fail(ErrorCode::kInvalidInput, "rotary feature dimension must be a positive multiple of 4, got " +
                                       std::to_string(dim));
  }
  if (features.size() != positions.size() * static_cast<std::size_t>(dim)) {
    fail(ErrorCode::kInvalidInput, "feature count does not match position count");
  }
  if (!(base > 0.0)) fail(ErrorCode::kInvalidInput, "rotary base must be positive");
  const int half = dim / 2;
  std::vector<double> inv_freq(half / 2);
  for (int i = 0; i < half / 2; ++i) inv_freq[i] = std::pow(base, -2.0 * i / half);

  std::vector<float> out(features.size());
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const float* f = features.data() + n * dim;
    float* o = out.data() + n * dim;
    for (int axis = 0; axis < 2; ++axis) {
      const double pos = axis == 0 ? positions[n].x : positions[n].y;
      const int offset = axis * half;
      for (int i = 0; i < half / 2; ++i) {
        const double angle = pos * inv_freq[i];
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const double a = f[offset + 2 * i];
        const double b = f[offset + 2 * i + 1];
        o[offset + 2 * i] = static_cast<float>(a * c - b * s);
        o[offset + 2 * i + 1] = static_cast<float>(a * s + b * c);
      }
    }
  }
  return out;
}

std::string_view to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::kDefault: return "Default";
    case TrainingMode::kRendering: return "Rendering";
    case TrainingMode::kIntrinsicToRelit: return "IntrinsicToRelit";
    case TrainingMode::kGeometryToRelit: return "GeometryToRelit";
    case TrainingMode::kRelitToGeometry: return "RelitToGeometry";
  }
  return "unknown";
}

std::string_view to_string(Dataset dataset) {
  switch (dataset) {
    case Dataset::kSynth: return "Synth";
    case Dataset::kDome: return "Dome";
    case Dataset::kItw: return "ITW";
  }
  return "unknown";
}

TrainingMode parse_training_mode(std::string_view name) {
  const std::string n = lower(name);
  for (TrainingMode m : kAllTrainingModes) {
    if (n == lower(to_string(m))) return m;
  }
  if (n == "intrinsic->relit" || n == "intrinsic-to-relit") return TrainingMode::kIntrinsicToRelit;
  if (n == "geometry->relit" || n == "geometry-to-relit") return TrainingMode::kGeometryToRelit;
  if (n == "relit->geometry" || n == "relit-to-geometry") return TrainingMode::kRelitToGeometry;
  fail(ErrorCode::kInvalidInput, "unknown training mode '" + std::string(name) + "'");
}

Dataset parse_dataset(std::string_view name) {
  const std::string n = lower(name);
  for (Dataset d : kAllDatasets) {
    if (n == lower(to_string(d))) return d;
  }
  fail(ErrorCode::kInvalidInput, "unknown dataset '" + std::string(name) + "'");
}

TrainingModeSpec training_mode_row(TrainingMode mode) {
  TrainingModeSpec spec;
  spec.mode = mode;
  switch (mode) {
    case TrainingMode::kDefault:
      spec.clear_set = {};
      spec.use_global_image = true;
      spec.use_illumination = true;
      spec.allowed_datasets = {true, true, false};
      break;
    case TrainingMode::kRendering:
      spec.clear_set = set_of({kAlbedo, kNormal, kGeometry, kSegmentation});
      spec.use_illumination = true;
      spec.allowed_datasets = {true, true, false};
      break;
    case TrainingMode::kIntrinsicToRelit:
      spec.clear_set = set_of({kAlbedo, kNormal, kGeometry, kSegmentation});
      spec.allowed_datasets = {false, false, true};
      break;
    case TrainingMode::kGeometryToRelit:
      spec.clear_set = set_of({kNormal, kGeometry, kSegmentation});
      spec.use_illumination = true;
      spec.allowed_datasets = {true, true, false};
      break;
    case TrainingMode::kRelitToGeometry:
      spec.clear_set = set_of({kRelit, kAlbedo, kSegmentation});
      spec.allowed_datasets = {true, false, false};
      break;
  }
  spec.noisy_set = complement(spec.clear_set);
  return spec;
}

TrainingModeSpec dispatch_mode(TrainingMode mode, Dataset dataset) {
  TrainingModeSpec spec = training_mode_row(mode);
  if (!spec.allows(dataset)) {
    fail(ErrorCode::kScheduling, "training mode " + std::string(to_string(mode)) +
                                     " is not scheduled on dataset " + std::string(to_string(dataset)));
  }
  return spec;
}

Conditions conditions_for(const TrainingModeSpec& spec, Conditions available) {
  if (!spec.use_global_image) available.global.reset();
  if (!spec.use_illumination) available.illumination.reset();
  return available;
}

}  // namespace lumigeo::latent

#pragma once

// Per-modality DiT input assembly. Every modality gets an 84-channel slice:
//
//   [ 0, 16)  its own (noisy or clear) latent
//   [16, 32)  global image condition, zeros when dropped
//   [32, 80)  illumination condition (ldr | log | dir), Relit only
//   [80, 83)  modality type embedding row
//   [83, 84)  switch plane: 1 = clear condition, 0 = noisy target
//
// The five slices are stacked along the leading axis in ModalityId order, the
// way frames of a video would be.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lumigeo/raster.hpp"
#include "lumigeo/tensor.hpp"

namespace lumigeo::latent {

enum class ModalityId : int { kAlbedo = 0, kNormal = 1, kGeometry = 2, kSegmentation = 3, kRelit = 4 };

inline constexpr int kModalityCount = 5;
inline constexpr std::array<ModalityId, kModalityCount> kAllModalities = {
    ModalityId::kAlbedo, ModalityId::kNormal, ModalityId::kGeometry, ModalityId::kSegmentation,
    ModalityId::kRelit};

inline constexpr int kLatentChannels = 16;
inline constexpr int kGlobalChannels = 16;
inline constexpr int kIlluminationMaps = 3;
inline constexpr int kIlluminationChannels = kIlluminationMaps * kLatentChannels;
inline constexpr int kTypeChannels = 3;
inline constexpr int kSwitchChannels = 1;
inline constexpr int kStackChannels =
    kLatentChannels + kGlobalChannels + kIlluminationChannels + kTypeChannels + kSwitchChannels;
static_assert(kStackChannels == 84);

inline constexpr int kLatentOffset = 0;
inline constexpr int kGlobalOffset = kLatentOffset + kLatentChannels;
inline constexpr int kIlluminationOffset = kGlobalOffset + kGlobalChannels;
inline constexpr int kTypeOffset = kIlluminationOffset + kIlluminationChannels;
inline constexpr int kSwitchOffset = kTypeOffset + kTypeChannels;

/// VAE spatial compression between images and latents.
inline constexpr int kLatentDownsample = 8;

constexpr int ordinal(ModalityId m) { return static_cast<int>(m); }
std::string_view to_string(ModalityId m);
/// Accepts full names ("albedo") and the short letters a, n, g, s, r / ie.
ModalityId parse_modality(std::string_view name);

/// H_l x W_l x C latent, stored as a raster (width = W_l, height = H_l).
using LatentTensor = Raster<float>;

struct ConditionSlice {
  ModalityId modality = ModalityId::kAlbedo;
  Raster<float> channels;  ///< kStackChannels deep
};

/// M x H_l x W_l x 84, contiguous.
class ModalityStack {
 public:
  ModalityStack() = default;
  ModalityStack(int height, int width);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  std::size_t index(int m, int y, int x, int c) const noexcept {
    return ((static_cast<std::size_t>(m) * height_ + y) * width_ + x) * kStackChannels + c;
  }
  float& at(int m, int y, int x, int c) noexcept { return data_[index(m, y, x, c)]; }
  float at(int m, int y, int x, int c) const noexcept { return data_[index(m, y, x, c)]; }

  ConditionSlice slice(ModalityId m) const;
  Tensor to_tensor() const;
  static ModalityStack from_tensor(const Tensor& tensor);

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// Fixed M x 3 modality embedding. The default rows are the 3-bit binary
/// codes of ordinal + 1; a trained table can be loaded in its place.
class ModalityTypeTable {
 public:
  using Row = std::array<float, kTypeChannels>;

  ModalityTypeTable();
  /// Throws kInvalidInput if any two rows coincide or a value is not finite.
  explicit ModalityTypeTable(const std::array<Row, kModalityCount>& rows);

  const Row& row(ModalityId m) const { return rows_[ordinal(m)]; }
  const std::array<Row, kModalityCount>& rows() const { return rows_; }

 private:
  std::array<Row, kModalityCount> rows_;
};

/// Copies a single-channel image (segmentation, iNOD) into three identical
/// channels for the RGB image codec. Three-channel input passes through.
ImageF replicate_to_rgb(const ImageF& image);

/// Concatenates the three encoded light maps (ldr, log, dir) into the
/// 48-channel illumination latent.
LatentTensor concat_illumination(const LatentTensor& ldr, const LatentTensor& log_intensity,
                                 const LatentTensor& direction);

/// One modality's slice. Absent conditions become exact zeros. Illumination
/// may only be attached to the Relit modality.
ConditionSlice assemble(const LatentTensor& noisy, const LatentTensor* global_condition,
                        const LatentTensor* illumination, ModalityId modality, bool clear,
                        const ModalityTypeTable& table);

/// Requires exactly one slice per modality, in ordinal order.
ModalityStack stack_modalities(std::span<const ConditionSlice> slices);

struct Conditions {
  std::optional<LatentTensor> global;
  std::optional<LatentTensor> illumination;
};

/// assemble() for all five modalities followed by stack_modalities(). The
/// illumination latent goes to Relit only.
ModalityStack assemble_stack(std::span<const LatentTensor> latents, const Conditions& conditions,
                             const std::array<bool, kModalityCount>& clear,
                             const ModalityTypeTable& table);

// ---------------------------------------------------------------------------
// Rotary position encoding shared by every modality.

struct Position2d {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr double kRopeBase = 1.0e4;

/// Rotates `count` feature vectors of length `dim` (row-major in `features`).
/// The first dim/2 entries rotate with x, the rest with y; within each half,
/// pair i turns by pos * base^(-2i / (dim/2)). No modality input exists, so
/// every modality sees the same encoding.
std::vector<float> apply_rope_2d(std::span<const float> features, int dim,
                                 std::span<const Position2d> positions, double base = kRopeBase);

// ---------------------------------------------------------------------------
// Training-mode dispatch.

enum class TrainingMode { kDefault, kRendering, kIntrinsicToRelit, kGeometryToRelit, kRelitToGeometry };
enum class Dataset { kSynth, kDome, kItw };

inline constexpr std::array<TrainingMode, 5> kAllTrainingModes = {
    TrainingMode::kDefault, TrainingMode::kRendering, TrainingMode::kIntrinsicToRelit,
    TrainingMode::kGeometryToRelit, TrainingMode::kRelitToGeometry};
inline constexpr std::array<Dataset, 3> kAllDatasets = {Dataset::kSynth, Dataset::kDome,
                                                        Dataset::kItw};

std::string_view to_string(TrainingMode mode);
std::string_view to_string(Dataset dataset);
TrainingMode parse_training_mode(std::string_view name);
Dataset parse_dataset(std::string_view name);

using ModalitySet = std::array<bool, kModalityCount>;

struct TrainingModeSpec {
  TrainingMode mode = TrainingMode::kDefault;
  ModalitySet clear_set{};
  ModalitySet noisy_set{};
  bool use_global_image = false;
  bool use_illumination = false;
  std::array<bool, 3> allowed_datasets{};

  bool allows(Dataset d) const { return allowed_datasets[static_cast<int>(d)]; }
  friend bool operator==(const TrainingModeSpec&, const TrainingModeSpec&) = default;
};

/// The row for `mode`, regardless of dataset.
TrainingModeSpec training_mode_row(TrainingMode mode);

/// The row for `mode`; throws kScheduling when the dataset is not one the
/// mode trains on.
TrainingModeSpec dispatch_mode(TrainingMode mode, Dataset dataset);

/// Switch bits for assembly: 1 exactly on the clear set.
inline ModalitySet switch_bits(const TrainingModeSpec& spec) { return spec.clear_set; }

/// Drops whatever conditions the mode does not use.
Conditions conditions_for(const TrainingModeSpec& spec, Conditions available);

}  // namespace lumigeo::latent

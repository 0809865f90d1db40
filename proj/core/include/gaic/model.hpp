#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaic/geometry.hpp"
#include "gaic/ops.hpp"
#include "gaic/optim.hpp"
#include "gaic/preprocess.hpp"
#include "gaic/tensor.hpp"

namespace gaic::nn {

// Architecture knobs. The backbone is five stride-2 conv stages; the maps
// after stages 3, 4 and 5 (cumulative strides 8, 16, 32) are resampled to
// the stride-16 extent, concatenated, and reduced to reduced_channels by a
// 1x1 convolution. Each crop is then scored from align_size x align_size
// RoI and RoD views through one wide fully-connected layer.
struct ModelConfig {
  std::array<int, 5> backbone_channels{16, 32, 64, 96, 128};
  int reduced_channels = 8;
  int align_size = 9;
  int head_width = 768;

  static constexpr std::array<int, 3> tap_strides{8, 16, 32};
  static constexpr int fusion_stride = 16;
  static constexpr int min_image_extent = 32;  // cumulative backbone stride

  void validate() const;
};

// Normalization applied to MOS targets during training; predictions are
// de-normalized with the inverse map for display.
struct MosNormalization {
  double mean = 0.0;
  double stddev = 1.0;
};

struct ScoredCrop {
  CropRect rect;
  double score = 0.0;  // de-normalized predicted MOS
  int rank = 0;        // 1-based position in the score ordering
};

class CropScorer {
 public:
  CropScorer(const ModelConfig& config, uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  MosNormalization& mos_norm() { return mos_norm_; }
  const MosNormalization& mos_norm() const { return mos_norm_; }

  // Seed of the run that produced these weights; carried through
  // checkpoints so every artifact names its seed.
  uint64_t train_seed() const { return train_seed_; }
  void set_train_seed(uint64_t seed) { train_seed_ = seed; }

  std::span<const TensorPtr> parameters() const { return params_; }
  std::span<const std::string> parameter_names() const { return names_; }
  int64_t parameter_count() const;
  void zero_grad() const;

  // Fused stride-16 feature map {1, reduced_channels, ~h/16, ~w/16} for a
  // preprocessed {1,3,h,w} image. The backbone runs once per image no
  // matter how many crops are scored afterwards.
  TensorPtr extract_features(Tape* tape, const TensorPtr& image) const;

  // Raw (normalized-scale) scores, one per crop, from a feature map
  // produced by extract_features for the same image. image_dims are the
  // preprocessed extents the crops are expressed in.
  std::vector<double> score_crops(const TensorPtr& features,
                                  std::span<const CropRect> crops,
                                  const ImageDims& image_dims) const;

  // Differentiable head path shared by training; output {num_crops, 1}.
  TensorPtr head_scores(Tape* tape, const TensorPtr& features,
                        std::span<const CropRect> crops,
                        const ImageDims& image_dims) const;

 private:
  ModelConfig config_;
  MosNormalization mos_norm_;
  uint64_t train_seed_ = 0;
  std::vector<TensorPtr> params_;
  std::vector<std::string> names_;

  // Parameter accessors by role.
  const TensorPtr& stage_conv(int i) const { return params_[3 * i]; }
  const TensorPtr& stage_gamma(int i) const { return params_[3 * i + 1]; }
  const TensorPtr& stage_shift(int i) const { return params_[3 * i + 2]; }
  const TensorPtr& fuse_conv() const { return params_[15]; }
  const TensorPtr& head_fc1() const { return params_[16]; }
  const TensorPtr& head_fc2() const { return params_[17]; }
};

// One training batch: a single preprocessed image, its sampled crops in
// preprocessed coordinates, and their normalized MOS targets.
struct TrainBatch {
  TensorPtr image;
  ImageDims image_dims;
  std::vector<CropRect> crops;
  std::vector<double> targets;
};

// Forward over the batch, mean Huber loss (delta 1), backward, one ADAM
// update. Returns the loss. A non-finite loss aborts before any state
// mutation.
double train_step(CropScorer& model, const TrainBatch& batch, AdamState& opt);

// Enumerates grid candidates on the source image, scores them on the
// preprocessed tensor, and returns the top return_k (clamped to the
// candidate count) by descending de-normalized score. With an aspect
// target, candidates outside |ratio - target| / target <= 0.05 are dropped
// first.
std::vector<ScoredCrop> predict_image(const CropScorer& model,
                                      const PreprocessedImage& image,
                                      const GridSpec& grid, int return_k,
                                      std::optional<double> aspect = {});

inline constexpr double kAspectFilterTolerance = 0.05;

}  // namespace gaic::nn

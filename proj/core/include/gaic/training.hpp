#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gaic/annotations.hpp"
#include "gaic/augment.hpp"
#include "gaic/model.hpp"
#include "gaic/preprocess.hpp"

namespace gaic {

struct TrainOptions {
  nn::ModelConfig model;
  int epochs = 80;
  double learning_rate = 1e-4;
  int crops_per_batch = 64;
  uint64_t seed = 0;
  double val_fraction = 0.1;
  bool augment = true;
  AugmentRanges aug_ranges;
  int short_side = 256;
  ChannelNorm channel_norm;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_srcc = 0.0;
  bool has_val = false;
};

struct TrainResult {
  nn::CropScorer model;  // best-validation parameters (final when no val set)
  std::vector<EpochStats> log;
  int best_epoch = 0;  // 0 when no epoch ran or no validation split
  std::vector<size_t> train_indices;
  std::vector<size_t> val_indices;
};

// Deterministic for a fixed seed: one batch per image per epoch, each batch
// being crops_per_batch randomly selected crops of one augmented image.
// MOS targets are normalized by the mean/std over all training-split crops.
// When a log stream is given, one "epoch <e> train_loss <l> val_srcc <s>"
// line is written per epoch.
TrainResult train_model(const std::vector<AnnotatedImage>& annotations,
                        const std::string& image_root, const TrainOptions& opt,
                        std::ostream* log_stream = nullptr);

// Mean per-image SRCC of model scores against annotated MOS. Images whose
// score vectors are degenerate (zero variance) are skipped.
double validation_srcc(const nn::CropScorer& model,
                       const std::vector<PreprocessedImage>& images,
                       const std::vector<const AnnotatedImage*>& annotations);

std::string resolve_image_path(const std::string& image_root,
                               const std::string& name);

}  // namespace gaic

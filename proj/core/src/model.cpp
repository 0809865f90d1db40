#include "gaic/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaic/rng.hpp"

namespace gaic::nn {

void ModelConfig::validate() const {
  for (int c : backbone_channels)
    if (c < 1) throw Error("ModelConfig: backbone channels must be positive");
  if (reduced_channels < 1)
    throw Error("ModelConfig: reduced_channels must be >= 1");
  if (align_size < 1) throw Error("ModelConfig: align_size must be >= 1");
  if (head_width < 1) throw Error("ModelConfig: head_width must be >= 1");
}

namespace {

TensorPtr xavier_tensor(std::vector<int> shape, int fan_in, int fan_out,
                        Rng& rng) {
  auto t = make_tensor(std::move(shape), /*requires_grad=*/true);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : t->value) v = rng.uniform(-limit, limit);
  return t;
}

}  // namespace

CropScorer::CropScorer(const ModelConfig& config, uint64_t init_seed)
    : config_(config) {
  config_.validate();
  Rng rng(init_seed);
  int in_c = 3;
  for (int i = 0; i < 5; ++i) {
    const int out_c = config_.backbone_channels[static_cast<size_t>(i)];
    params_.push_back(
        xavier_tensor({out_c, in_c, 3, 3}, in_c * 9, out_c * 9, rng));
    names_.push_back("stage" + std::to_string(i + 1) + ".conv.w");
    params_.push_back(full({out_c}, 1.0));
    params_.back()->requires_grad = true;
    names_.push_back("stage" + std::to_string(i + 1) + ".norm.gamma");
    params_.push_back(full({out_c}, 0.0));
    params_.back()->requires_grad = true;
    names_.push_back("stage" + std::to_string(i + 1) + ".norm.shift");
    in_c = out_c;
  }
  const int concat_c = config_.backbone_channels[2] +
                       config_.backbone_channels[3] +
                       config_.backbone_channels[4];
  params_.push_back(xavier_tensor({config_.reduced_channels, concat_c, 1, 1},
                                  concat_c, config_.reduced_channels, rng));
  names_.push_back("fuse.conv.w");

  const int head_in =
      2 * config_.reduced_channels * config_.align_size * config_.align_size;
  params_.push_back(xavier_tensor({head_in, config_.head_width}, head_in,
                                  config_.head_width, rng));
  names_.push_back("head.fc1.w");
  params_.push_back(
      xavier_tensor({config_.head_width, 1}, config_.head_width, 1, rng));
  names_.push_back("head.fc2.w");
}

int64_t CropScorer::parameter_count() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

void CropScorer::zero_grad() const {
  for (const auto& p : params_) p->zero_grad();
}

TensorPtr CropScorer::extract_features(Tape* tape,
                                       const TensorPtr& image) const {
  if (image->ndim() != 4 || image->dim(0) != 1 || image->dim(1) != 3)
    throw Error("extract_features: expected a {1,3,h,w} image tensor");
  if (image->dim(2) < ModelConfig::min_image_extent ||
      image->dim(3) < ModelConfig::min_image_extent)
    throw Error("extract_features: image " + std::to_string(image->dim(2)) +
                "x" + std::to_string(image->dim(3)) +
                " is smaller than the backbone stride " +
                std::to_string(ModelConfig::min_image_extent));

  TensorPtr x = image;
  TensorPtr taps[3];
  for (int i = 0; i < 5; ++i) {
    x = conv2d(tape, x, stage_conv(i), /*stride=*/2, /*padding=*/1);
    // Spatial statistics are undefined on a 1x1 map (tiny debug inputs);
    // such a stage runs unnormalized.
    if (x->dim(2) * x->dim(3) >= 2)
      x = channel_norm(tape, x, stage_gamma(i), stage_shift(i));
    x = relu(tape, x);
    if (i >= 2) taps[i - 2] = x;
  }
  const int fused_h = taps[1]->dim(2), fused_w = taps[1]->dim(3);
  const TensorPtr down = bilinear_resize(tape, taps[0], fused_h, fused_w);
  const TensorPtr up = bilinear_resize(tape, taps[2], fused_h, fused_w);
  const TensorPtr parts[] = {down, taps[1], up};
  const TensorPtr fused = channel_concat(tape, parts);
  return conv2d(tape, fused, fuse_conv(), /*stride=*/1, /*padding=*/0);
}

TensorPtr CropScorer::head_scores(Tape* tape, const TensorPtr& features,
                                  std::span<const CropRect> crops,
                                  const ImageDims& image_dims) const {
  if (crops.empty()) throw Error("head_scores: empty crop list");
  const int s = config_.align_size;
  std::vector<TensorPtr> aligned;
  aligned.reserve(crops.size());
  for (const auto& crop : crops) {
    const TensorPtr roi = roi_align(tape, features, crop, image_dims, s,
                                    ModelConfig::fusion_stride);
    const TensorPtr rod = rod_align(tape, features, crop, image_dims, s,
                                    ModelConfig::fusion_stride);
    const TensorPtr pair[] = {roi, rod};
    aligned.push_back(channel_concat(tape, pair));
  }
  const TensorPtr stacked = batch_concat(tape, aligned);
  const TensorPtr flat = flatten_rows(tape, stacked);
  const TensorPtr hidden = relu(tape, fully_connected(tape, flat, head_fc1()));
  return fully_connected(tape, hidden, head_fc2());
}

std::vector<double> CropScorer::score_crops(const TensorPtr& features,
                                            std::span<const CropRect> crops,
                                            const ImageDims& image_dims) const {
  if (crops.empty()) return {};
  const TensorPtr out = head_scores(nullptr, features, crops, image_dims);
  return out->value;
}

double train_step(CropScorer& model, const TrainBatch& batch, AdamState& opt) {
  if (batch.crops.empty()) throw Error("train_step: batch has no crops");
  if (batch.crops.size() != batch.targets.size())
    throw Error("train_step: crop and target counts differ");
  for (double t : batch.targets)
    if (!std::isfinite(t)) throw Error("train_step: non-finite target");

  Tape tape;
  const TensorPtr features = model.extract_features(&tape, batch.image);
  const TensorPtr scores =
      model.head_scores(&tape, features, batch.crops, batch.image_dims);
  auto targets = from_values({static_cast<int>(batch.targets.size()), 1},
                             batch.targets);
  const TensorPtr loss = huber_loss(&tape, scores, targets, 1.0);
  const double loss_value = loss->value[0];
  if (!std::isfinite(loss_value))
    throw Error("train_step: non-finite loss " + std::to_string(loss_value) +
                "; parameters left untouched");

  model.zero_grad();
  tape.backward(loss);
  adam_step(model.parameters(), opt);
  return loss_value;
}

std::vector<ScoredCrop> predict_image(const CropScorer& model,
                                      const PreprocessedImage& image,
                                      const GridSpec& grid, int return_k,
                                      std::optional<double> aspect) {
  if (return_k < 1) throw Error("predict_image: return_k must be >= 1");
  auto candidates = enumerate_candidates(image.source, grid);
  if (aspect) {
    if (!(*aspect > 0.0)) throw Error("predict_image: aspect must be positive");
    std::erase_if(candidates, [&](const CropRect& c) {
      return std::abs(aspect_ratio(c) - *aspect) / *aspect >
             kAspectFilterTolerance;
    });
  }
  if (candidates.empty())
    throw Error(aspect ? "predict_image: no candidates within the aspect filter"
                       : "predict_image: candidate set is empty");

  std::vector<CropRect> mapped;
  mapped.reserve(candidates.size());
  for (const auto& c : candidates) mapped.push_back(image.map_crop(c));

  const TensorPtr features = model.extract_features(nullptr, image.tensor);
  const auto raw = model.score_crops(features, mapped, image.scaled);

  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return raw[a] > raw[b]; });

  const auto& norm = model.mos_norm();
  const int k = std::min<int>(return_k, static_cast<int>(candidates.size()));
  std::vector<ScoredCrop> out;
  out.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const int idx = order[static_cast<size_t>(i)];
    out.push_back(ScoredCrop{candidates[static_cast<size_t>(idx)],
                             raw[static_cast<size_t>(idx)] * norm.stddev +
                                 norm.mean,
                             i + 1});
  }
  return out;
}

}  // namespace gaic::nn

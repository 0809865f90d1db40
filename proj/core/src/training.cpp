#include "gaic/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "gaic/metrics.hpp"
#include "gaic/rng.hpp"

namespace gaic {

std::string resolve_image_path(const std::string& image_root,
                               const std::string& name) {
  if (image_root.empty() || name.front() == '/') return name;
  return image_root + "/" + name;
}

double validation_srcc(const nn::CropScorer& model,
                       const std::vector<PreprocessedImage>& images,
                       const std::vector<const AnnotatedImage*>& annotations) {
  double total = 0.0;
  int counted = 0;
  for (size_t i = 0; i < images.size(); ++i) {
    const auto& ann = *annotations[i];
    std::vector<CropRect> mapped;
    mapped.reserve(ann.crops.size());
    std::vector<double> mos;
    mos.reserve(ann.crops.size());
    for (const auto& c : ann.crops) {
      mapped.push_back(images[i].map_crop(c.rect));
      mos.push_back(c.mos);
    }
    const auto features = model.extract_features(nullptr, images[i].tensor);
    const auto scores = model.score_crops(features, mapped, images[i].scaled);
    try {
      total += srcc(mos, scores);
      ++counted;
    } catch (const Error&) {
      // zero-variance image, skipped
    }
  }
  return counted ? total / counted : 0.0;
}

TrainResult train_model(const std::vector<AnnotatedImage>& annotations,
                        const std::string& image_root, const TrainOptions& opt,
                        std::ostream* log_stream) {
  if (annotations.empty()) throw Error("train_model: no annotated images");
  if (opt.epochs < 0) throw Error("train_model: negative epoch count");
  if (opt.crops_per_batch < 1)
    throw Error("train_model: crops_per_batch must be >= 1");
  for (const auto& a : annotations)
    if (a.crops.empty())
      throw Error("train_model: image '" + a.path + "' has no crops");

  Rng rng(opt.seed);

  // Split by image with a seeded shuffle.
  const size_t n = annotations.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = n; i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  size_t val_count = static_cast<size_t>(
      std::llround(opt.val_fraction * static_cast<double>(n)));
  if (val_count >= n) val_count = n - 1;

  TrainResult result{nn::CropScorer(opt.model, rng.next_u64()), {}, 0, {}, {}};
  result.val_indices.assign(order.begin(),
                            order.begin() + static_cast<long>(val_count));
  result.train_indices.assign(order.begin() + static_cast<long>(val_count),
                              order.end());
  std::sort(result.val_indices.begin(), result.val_indices.end());
  std::sort(result.train_indices.begin(), result.train_indices.end());

  // MOS normalization over all training-split crops.
  double mos_sum = 0.0;
  int64_t mos_count = 0;
  for (size_t idx : result.train_indices)
    for (const auto& c : annotations[idx].crops) {
      mos_sum += c.mos;
      ++mos_count;
    }
  const double mos_mean = mos_sum / static_cast<double>(mos_count);
  double mos_var = 0.0;
  for (size_t idx : result.train_indices)
    for (const auto& c : annotations[idx].crops) {
      const double d = c.mos - mos_mean;
      mos_var += d * d;
    }
  mos_var /= static_cast<double>(mos_count);
  if (mos_var <= 0.0)
    throw Error("train_model: training MOS are constant, nothing to fit");
  result.model.mos_norm() =
      nn::MosNormalization{mos_mean, std::sqrt(mos_var)};

  // Raw training images stay in memory; validation images are preprocessed
  // once since they are never augmented.
  std::vector<RawImage> train_raw;
  train_raw.reserve(result.train_indices.size());
  for (size_t idx : result.train_indices)
    train_raw.push_back(
        read_ppm(resolve_image_path(image_root, annotations[idx].path)));
  std::vector<PreprocessedImage> val_images;
  std::vector<const AnnotatedImage*> val_anns;
  for (size_t idx : result.val_indices) {
    val_images.push_back(
        preprocess(read_ppm(resolve_image_path(image_root, annotations[idx].path)),
                   opt.short_side, opt.channel_norm));
    val_anns.push_back(&annotations[idx]);
  }

  nn::AdamState adam;
  adam.lr = opt.learning_rate;

  std::vector<std::vector<double>> best_params;
  double best_srcc = -2.0;
  const auto snapshot = [&] {
    best_params.clear();
    for (const auto& p : result.model.parameters())
      best_params.push_back(p->value);
  };

  const size_t train_n = result.train_indices.size();
  std::vector<size_t> epoch_order(train_n);
  const double mos_std = result.model.mos_norm().stddev;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    std::iota(epoch_order.begin(), epoch_order.end(), 0);
    for (size_t i = train_n; i > 1; --i) {
      const size_t j =
          static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(epoch_order[i - 1], epoch_order[j]);
    }

    double loss_sum = 0.0;
    for (size_t pos = 0; pos < train_n; ++pos) {
      const size_t local = epoch_order[pos];
      const auto& ann = annotations[result.train_indices[local]];

      AugmentedSample sample;
      if (opt.augment) {
        sample = augment(train_raw[local], ann.crops, rng, opt.aug_ranges);
      } else {
        sample.image = train_raw[local];
        sample.crops = ann.crops;
      }
      const PreprocessedImage pre =
          preprocess(sample.image, opt.short_side, opt.channel_norm);

      const size_t have = sample.crops.size();
      const size_t want = static_cast<size_t>(opt.crops_per_batch);
      std::vector<size_t> picks;
      picks.reserve(want);
      if (have >= want) {
        // Without replacement: partial Fisher-Yates over crop indices.
        std::vector<size_t> pool(have);
        std::iota(pool.begin(), pool.end(), 0);
        for (size_t i = 0; i < want; ++i) {
          const size_t j = static_cast<size_t>(
              rng.uniform_int(static_cast<int64_t>(i),
                              static_cast<int64_t>(have) - 1));
          std::swap(pool[i], pool[j]);
          picks.push_back(pool[i]);
        }
      } else {
        for (size_t i = 0; i < want; ++i)
          picks.push_back(static_cast<size_t>(
              rng.uniform_int(0, static_cast<int64_t>(have) - 1)));
      }

      nn::TrainBatch batch;
      batch.image = pre.tensor;
      batch.image_dims = pre.scaled;
      batch.crops.reserve(want);
      batch.targets.reserve(want);
      for (size_t pick : picks) {
        batch.crops.push_back(pre.map_crop(sample.crops[pick].rect));
        batch.targets.push_back((sample.crops[pick].mos - mos_mean) / mos_std);
      }
      loss_sum += nn::train_step(result.model, batch, adam);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_n);
    stats.has_val = !val_images.empty();
    if (stats.has_val) {
      stats.val_srcc = validation_srcc(result.model, val_images, val_anns);
      if (stats.val_srcc > best_srcc) {
        best_srcc = stats.val_srcc;
        result.best_epoch = epoch;
        snapshot();
      }
    }
    result.log.push_back(stats);
    if (log_stream) {
      char line[128];
      std::snprintf(line, sizeof line, "epoch %d train_loss %.6f val_srcc %.6f\n",
                    epoch, stats.train_loss, stats.val_srcc);
      *log_stream << line << std::flush;
    }
  }

  if (!best_params.empty()) {
    const auto params = result.model.parameters();
    for (size_t i = 0; i < params.size(); ++i)
      params[i]->value = best_params[i];
  }
  return result;
}

}  // namespace gaic

#include "gaic/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <mutex>
#include <thread>

#include "gaic/training.hpp"

namespace gaic {

namespace {

std::vector<ScoreVector> mos_vectors(const std::vector<AnnotatedImage>& anns) {
  std::vector<ScoreVector> out;
  out.reserve(anns.size());
  for (const auto& a : anns) {
    ScoreVector v;
    v.reserve(a.crops.size());
    for (const auto& c : a.crops) v.push_back(c.mos);
    out.push_back(std::move(v));
  }
  return out;
}

// Index of the annotated candidate closest to `target` by IoU; ties keep
// the earliest candidate.
size_t nearest_candidate(const AnnotatedImage& ann, const CropRect& target) {
  size_t best = 0;
  double best_iou = -1.0;
  for (size_t i = 0; i < ann.crops.size(); ++i) {
    const double v = iou(ann.crops[i].rect, target);
    if (v > best_iou) {
      best_iou = v;
      best = i;
    }
  }
  return best;
}

BaselineRow baseline_row(const std::string& name,
                         const std::vector<ScoreVector>& fake_predictions,
                         const std::vector<ScoreVector>& groundtruth,
                         double beta) {
  BaselineRow row;
  row.name = name;
  row.acc_1_5 = acc_k_n(fake_predictions, groundtruth, 1, 5);
  row.acc_1_10 = acc_k_n(fake_predictions, groundtruth, 1, 10);
  row.acc_w_1_5 = acc_weighted_k_n(fake_predictions, groundtruth, 1, 5, beta);
  row.acc_w_1_10 =
      acc_weighted_k_n(fake_predictions, groundtruth, 1, 10, beta);
  return row;
}

void append_cell(std::string& line, double v, bool available) {
  char buf[32];
  if (available)
    std::snprintf(buf, sizeof buf, "%9.4f", v);
  else
    std::snprintf(buf, sizeof buf, "%9s", "--");
  line += buf;
}

}  // namespace

EvalResult evaluate_model(const nn::CropScorer& model,
                          const std::vector<AnnotatedImage>& annotations,
                          const std::string& image_root,
                          const EvalOptions& opt) {
  if (annotations.empty()) throw Error("evaluate_model: no annotated images");

  std::vector<AnnotatedImage> predictions(annotations.size());
  const auto score_image = [&](size_t i) {
    const auto& ann = annotations[i];
    if (ann.crops.empty())
      throw Error("evaluate_model: image '" + ann.path + "' has no crops");
    const RawImage raw = read_ppm(resolve_image_path(image_root, ann.path));
    if (raw.dims() != ann.dims)
      throw Error("evaluate_model: image '" + ann.path +
                  "' extents do not match its annotation record");
    const PreprocessedImage pre =
        preprocess(raw, opt.short_side, opt.channel_norm);
    std::vector<CropRect> mapped;
    mapped.reserve(ann.crops.size());
    for (const auto& c : ann.crops) mapped.push_back(pre.map_crop(c.rect));
    const auto features = model.extract_features(nullptr, pre.tensor);
    const auto raw_scores = model.score_crops(features, mapped, pre.scaled);

    AnnotatedImage rec;
    rec.path = ann.path;
    rec.dims = ann.dims;
    rec.prediction = true;
    rec.crops.reserve(ann.crops.size());
    const auto& norm = model.mos_norm();
    for (size_t c = 0; c < ann.crops.size(); ++c)
      rec.crops.push_back(CropMos{ann.crops[c].rect,
                                  raw_scores[c] * norm.stddev + norm.mean});
    predictions[i] = std::move(rec);
  };

  const int threads = std::max(1, opt.threads);
  if (threads == 1) {
    for (size_t i = 0; i < annotations.size(); ++i) score_image(i);
  } else {
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= annotations.size()) break;
          try {
            score_image(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  EvalResult result;
  result.predictions = std::move(predictions);
  result.model_report =
      evaluate_predictions(annotations, result.predictions, opt.beta);
  result.baselines = baseline_rows(annotations, opt.beta);
  return result;
}

MetricReport evaluate_predictions(const std::vector<AnnotatedImage>& groundtruth,
                                  const std::vector<AnnotatedImage>& predictions,
                                  double beta) {
  if (groundtruth.size() != predictions.size())
    throw Error("evaluate_predictions: image counts differ (" +
                std::to_string(groundtruth.size()) + " vs " +
                std::to_string(predictions.size()) + ")");
  for (size_t i = 0; i < groundtruth.size(); ++i) {
    const auto& g = groundtruth[i];
    const auto& p = predictions[i];
    if (g.crops.size() != p.crops.size())
      throw Error("image '" + g.path + "': candidate counts differ (" +
                  std::to_string(g.crops.size()) + " vs " +
                  std::to_string(p.crops.size()) + ")");
    for (size_t c = 0; c < g.crops.size(); ++c)
      if (!(g.crops[c].rect == p.crops[c].rect))
        throw Error("image '" + g.path + "': candidate " + std::to_string(c) +
                    " differs between groundtruth and predictions");
  }
  return report(mos_vectors(predictions), mos_vectors(groundtruth), beta);
}

std::vector<BaselineRow> baseline_rows(
    const std::vector<AnnotatedImage>& annotations, double beta) {
  const auto groundtruth = mos_vectors(annotations);
  std::vector<std::vector<ScoreVector>> fake(3);
  for (const auto& ann : annotations) {
    if (ann.crops.empty())
      throw Error("baseline_rows: image '" + ann.path + "' has no crops");
    size_t largest = 0;
    for (size_t i = 1; i < ann.crops.size(); ++i)
      if (crop_area(ann.crops[i].rect) > crop_area(ann.crops[largest].rect))
        largest = i;
    const size_t chosen[3] = {
        largest,
        nearest_candidate(ann, CropRect{0, 0, ann.dims.height, ann.dims.width}),
        nearest_candidate(
            ann, baseline_crop(ann.dims, BaselineMode::central, GridSpec{})),
    };
    for (int b = 0; b < 3; ++b) {
      ScoreVector v(ann.crops.size(), 0.0);
      v[chosen[b]] = 1.0;
      fake[b].push_back(std::move(v));
    }
  }
  return {
      baseline_row("baseline_L", fake[0], groundtruth, beta),
      baseline_row("baseline_N", fake[1], groundtruth, beta),
      baseline_row("baseline_C", fake[2], groundtruth, beta),
  };
}

std::string format_eval_table(const EvalResult& r) {
  std::string out;
  out += "method     ";
  char buf[32];
  const char* headers[] = {"SRCC",    "PCC",     "Acc1/5",  "Acc2/5",
                           "Acc3/5",  "Acc4/5",  "Acc1/10", "Acc2/10",
                           "Acc3/10", "Acc4/10", "Aw1/5",   "Aw2/5",
                           "Aw3/5",   "Aw4/5",   "Aw1/10",  "Aw2/10",
                           "Aw3/10",  "Aw4/10"};
  for (const char* h : headers) {
    std::snprintf(buf, sizeof buf, "%9s", h);
    out += buf;
  }
  out += '\n';

  out += "model      ";
  append_cell(out, r.model_report.mean_srcc, true);
  append_cell(out, r.model_report.mean_pcc, true);
  for (int n : kReportNs)
    for (int k : kReportKs) append_cell(out, r.model_report.acc.at({k, n}), true);
  for (int n : kReportNs)
    for (int k : kReportKs)
      append_cell(out, r.model_report.acc_weighted.at({k, n}), true);
  out += '\n';

  for (const auto& b : r.baselines) {
    std::snprintf(buf, sizeof buf, "%-11s", b.name.c_str());
    out += buf;
    append_cell(out, 0, false);  // SRCC
    append_cell(out, 0, false);  // PCC
    for (int n : kReportNs)
      for (int k : kReportKs)
        append_cell(out, n == 5 ? b.acc_1_5 : b.acc_1_10, k == 1);
    for (int n : kReportNs)
      for (int k : kReportKs)
        append_cell(out, n == 5 ? b.acc_w_1_5 : b.acc_w_1_10, k == 1);
    out += '\n';
  }
  return out;
}

std::string format_eval_kv(const EvalResult& r) {
  std::string out = format_report_kv(r.model_report);
  char buf[96];
  for (const auto& b : r.baselines) {
    std::string key = b.name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::snprintf(buf, sizeof buf, "%s_acc_1_5 %.12f\n", key.c_str(), b.acc_1_5);
    out += buf;
    std::snprintf(buf, sizeof buf, "%s_acc_1_10 %.12f\n", key.c_str(),
                  b.acc_1_10);
    out += buf;
    std::snprintf(buf, sizeof buf, "%s_acc_w_1_5 %.12f\n", key.c_str(),
                  b.acc_w_1_5);
    out += buf;
    std::snprintf(buf, sizeof buf, "%s_acc_w_1_10 %.12f\n", key.c_str(),
                  b.acc_w_1_10);
    out += buf;
  }
  return out;
}

}  // namespace gaic

#pragma once

#include <string>
#include <vector>

#include "gaic/annotations.hpp"
#include "gaic/metrics.hpp"
#include "gaic/model.hpp"
#include "gaic/preprocess.hpp"

namespace gaic {

struct EvalOptions {
  GridSpec grid;
  double beta = 1.0;
  int threads = 1;
  int short_side = 256;
  ChannelNorm channel_norm;
};

// Single-return baselines report only the K=1 columns; everything else is
// unavailable.
struct BaselineRow {
  std::string name;
  double acc_1_5 = 0.0;
  double acc_1_10 = 0.0;
  double acc_w_1_5 = 0.0;
  double acc_w_1_10 = 0.0;
};

struct EvalResult {
  MetricReport model_report;
  std::vector<BaselineRow> baselines;
  std::vector<AnnotatedImage> predictions;  // PRED records, one per image
};

// Scores every annotated crop of every image with the model (per-image work
// optionally spread over threads; results are independent of the thread
// count) and aggregates the full metric grid plus the three baselines.
EvalResult evaluate_model(const nn::CropScorer& model,
                          const std::vector<AnnotatedImage>& annotations,
                          const std::string& image_root,
                          const EvalOptions& opt);

// Metric report for precomputed predictions. The prediction records must
// carry exactly the groundtruth's candidate rectangles, in order.
MetricReport evaluate_predictions(const std::vector<AnnotatedImage>& groundtruth,
                                  const std::vector<AnnotatedImage>& predictions,
                                  double beta = 1.0);

// Baseline rows computed from annotations alone; no model involved. The
// largest-candidate baseline picks the max-area annotated crop; the no-crop
// and central baselines map their rectangle to the nearest annotated
// candidate by IoU.
std::vector<BaselineRow> baseline_rows(
    const std::vector<AnnotatedImage>& annotations, double beta = 1.0);

std::string format_eval_table(const EvalResult& r);
std::string format_eval_kv(const EvalResult& r);

}  // namespace gaic

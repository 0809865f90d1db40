#include "gaic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace gaic {

namespace {

void check_pair(const ScoreVector& g, const ScoreVector& p) {
  if (g.size() != p.size())
    throw Error("score vectors differ in length: " + std::to_string(g.size()) +
                " vs " + std::to_string(p.size()));
  if (g.size() < 2)
    throw Error("correlation needs at least 2 scores, got " +
                std::to_string(g.size()));
  for (double v : g)
    if (!std::isfinite(v)) throw Error("groundtruth score is not finite");
  for (double v : p)
    if (!std::isfinite(v)) throw Error("predicted score is not finite");
}

// Indices sorted by descending score; equal scores keep candidate order.
std::vector<int> order_by_score_desc(const ScoreVector& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return v[a] > v[b]; });
  return idx;
}

}  // namespace

std::vector<double> rank(const ScoreVector& v) {
  if (v.empty()) throw Error("rank: empty score vector");
  const auto idx = order_by_score_desc(v);
  std::vector<double> ranks(v.size(), 0.0);
  size_t i = 0;
  while (i < idx.size()) {
    size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) ranks[idx[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<int> ordinal_rank(const ScoreVector& v) {
  const auto idx = order_by_score_desc(v);
  std::vector<int> ranks(v.size(), 0);
  for (size_t pos = 0; pos < idx.size(); ++pos)
    ranks[idx[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

double pcc(const ScoreVector& g, const ScoreVector& p) {
  check_pair(g, p);
  const size_t n = g.size();
  double mg = 0.0, mp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mg += g[i];
    mp += p[i];
  }
  mg /= static_cast<double>(n);
  mp /= static_cast<double>(n);
  double sgg = 0.0, spp = 0.0, sgp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double a = g[i] - mg;
    const double b = p[i] - mp;
    sgg += a * a;
    spp += b * b;
    sgp += a * b;
  }
  if (sgg == 0.0) throw Error("pcc: first score vector has zero variance");
  if (spp == 0.0) throw Error("pcc: second score vector has zero variance");
  return sgp / std::sqrt(sgg * spp);
}

double srcc(const ScoreVector& g, const ScoreVector& p) {
  check_pair(g, p);
  return pcc(rank(g), rank(p));
}

std::vector<int> top_n_set(const ScoreVector& g, int n) {
  if (n < 1) throw Error("top_n_set: N must be >= 1");
  if (static_cast<size_t>(n) > g.size())
    throw Error("top_n_set: N=" + std::to_string(n) + " exceeds " +
                std::to_string(g.size()) + " candidates");
  std::vector<int> out;
  for (size_t i = 0; i < g.size(); ++i) {
    int strictly_better = 0;
    for (size_t j = 0; j < g.size(); ++j)
      if (g[j] > g[i]) ++strictly_better;
    if (strictly_better < n) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> top_k_by_score(const ScoreVector& p, int k) {
  if (k < 1) throw Error("top_k_by_score: K must be >= 1");
  if (static_cast<size_t>(k) > p.size())
    throw Error("image has " + std::to_string(p.size()) +
                " candidates, fewer than K=" + std::to_string(k));
  auto idx = order_by_score_desc(p);
  idx.resize(static_cast<size_t>(k));
  return idx;
}

namespace {

void check_image_sets(const std::vector<ScoreVector>& predictions,
                      const std::vector<ScoreVector>& groundtruth, int k,
                      int n) {
  if (predictions.size() != groundtruth.size())
    throw Error("prediction and groundtruth image counts differ");
  if (predictions.empty()) throw Error("metric over zero images");
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != groundtruth[i].size())
      throw Error("image " + std::to_string(i) +
                  ": prediction/groundtruth candidate counts differ");
    if (predictions[i].size() < static_cast<size_t>(std::max(k, n)))
      throw Error("image " + std::to_string(i) + " has " +
                  std::to_string(predictions[i].size()) +
                  " candidates, fewer than required by K=" + std::to_string(k) +
                  ", N=" + std::to_string(n));
  }
}

}  // namespace

double acc_k_n(const std::vector<ScoreVector>& predictions,
               const std::vector<ScoreVector>& groundtruth, int k, int n) {
  check_image_sets(predictions, groundtruth, k, n);
  const size_t images = predictions.size();
  double hits = 0.0;
  for (size_t i = 0; i < images; ++i) {
    const auto returned = top_k_by_score(predictions[i], k);
    const auto best = top_n_set(groundtruth[i], n);
    for (int idx : returned)
      if (std::binary_search(best.begin(), best.end(), idx)) hits += 1.0;
  }
  return hits / (static_cast<double>(images) * static_cast<double>(k));
}

double acc_weighted_k_n(const std::vector<ScoreVector>& predictions,
                        const std::vector<ScoreVector>& groundtruth, int k,
                        int n, double beta) {
  check_image_sets(predictions, groundtruth, k, n);
  if (!(beta > 0.0)) throw Error("acc_weighted_k_n: beta must be positive");
  const size_t images = predictions.size();
  double total = 0.0;
  for (size_t i = 0; i < images; ++i) {
    auto returned = top_k_by_score(predictions[i], k);
    const auto best = top_n_set(groundtruth[i], n);
    const auto gt_rank = ordinal_rank(groundtruth[i]);
    // Sort the K returns by descending groundtruth score (ordinal rank
    // already encodes the tie-break by candidate order).
    std::sort(returned.begin(), returned.end(),
              [&](int a, int b) { return gt_rank[a] < gt_rank[b]; });
    for (size_t j = 0; j < returned.size(); ++j) {
      const int idx = returned[j];
      if (!std::binary_search(best.begin(), best.end(), idx)) continue;
      const double displacement =
          static_cast<double>(gt_rank[idx]) - static_cast<double>(j + 1);
      total += std::exp(-beta * displacement / static_cast<double>(n));
    }
  }
  return total / (static_cast<double>(images) * static_cast<double>(k));
}

MetricReport report(const std::vector<ScoreVector>& predictions,
                    const std::vector<ScoreVector>& groundtruth, double beta) {
  if (predictions.size() != groundtruth.size())
    throw Error("report: prediction and groundtruth image counts differ");
  if (predictions.empty()) throw Error("report: no images");

  MetricReport r;
  r.images = static_cast<int>(predictions.size());
  double sum_pcc = 0.0, sum_srcc = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    try {
      sum_pcc += pcc(groundtruth[i], predictions[i]);
      sum_srcc += srcc(groundtruth[i], predictions[i]);
    } catch (const Error& e) {
      throw Error("image " + std::to_string(i) + ": " + e.what());
    }
  }
  r.mean_pcc = sum_pcc / r.images;
  r.mean_srcc = sum_srcc / r.images;
  for (int k : kReportKs) {
    for (int n : kReportNs) {
      r.acc[{k, n}] = acc_k_n(predictions, groundtruth, k, n);
      r.acc_weighted[{k, n}] =
          acc_weighted_k_n(predictions, groundtruth, k, n, beta);
    }
  }
  return r;
}

std::string format_report_table(const MetricReport& r) {
  std::ostringstream os;
  char buf[64];
  os << "metric      ";
  for (int n : kReportNs)
    for (int k : kReportKs) {
      std::snprintf(buf, sizeof buf, "%8s", ("K" + std::to_string(k) + "/N" +
                                             std::to_string(n))
                                                .c_str());
      os << buf;
    }
  os << '\n';
  os << "acc         ";
  for (int n : kReportNs)
    for (int k : kReportKs) {
      std::snprintf(buf, sizeof buf, "%8.4f", r.acc.at({k, n}));
      os << buf;
    }
  os << '\n';
  os << "acc_weighted";
  for (int n : kReportNs)
    for (int k : kReportKs) {
      std::snprintf(buf, sizeof buf, "%8.4f", r.acc_weighted.at({k, n}));
      os << buf;
    }
  os << '\n';
  std::snprintf(buf, sizeof buf, "mean_srcc %8.4f\n", r.mean_srcc);
  os << buf;
  std::snprintf(buf, sizeof buf, "mean_pcc  %8.4f\n", r.mean_pcc);
  os << buf;
  std::snprintf(buf, sizeof buf, "images    %8d\n", r.images);
  os << buf;
  return os.str();
}

std::string format_report_kv(const MetricReport& r) {
  std::ostringstream os;
  char buf[96];
  std::snprintf(buf, sizeof buf, "images %d\n", r.images);
  os << buf;
  std::snprintf(buf, sizeof buf, "srcc %.12f\n", r.mean_srcc);
  os << buf;
  std::snprintf(buf, sizeof buf, "pcc %.12f\n", r.mean_pcc);
  os << buf;
  for (int n : kReportNs)
    for (int k : kReportKs) {
      std::snprintf(buf, sizeof buf, "acc_%d_%d %.12f\n", k, n,
                    r.acc.at({k, n}));
      os << buf;
    }
  for (int n : kReportNs)
    for (int k : kReportKs) {
      std::snprintf(buf, sizeof buf, "acc_w_%d_%d %.12f\n", k, n,
                    r.acc_weighted.at({k, n}));
      os << buf;
    }
  return os.str();
}

}  // namespace gaic

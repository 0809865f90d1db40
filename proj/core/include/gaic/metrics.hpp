#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gaic/error.hpp"

namespace gaic {

// Scores for all candidate crops of one image, in canonical candidate order.
using ScoreVector = std::vector<double>;

// Fractional ranks with rank 1 for the highest score; tied scores receive
// the mean of the rank positions they span.
std::vector<double> rank(const ScoreVector& v);

// Ordinal ranks 1..n by descending score, ties broken by candidate order.
// This is the rank convention used by the weighted-accuracy penalties; it
// keeps every weight <= 1.
std::vector<int> ordinal_rank(const ScoreVector& v);

// Pearson correlation. Throws on mismatched lengths, length < 2, or a
// zero-variance vector (degenerate inputs never silently become NaN).
double pcc(const ScoreVector& g, const ScoreVector& p);

// Spearman rank-order correlation: pcc over fractional ranks.
double srcc(const ScoreVector& g, const ScoreVector& p);

// Indices whose score has fewer than n strictly better scores. Ties at the
// boundary are all included, so the set can exceed n elements. Sorted
// ascending.
std::vector<int> top_n_set(const ScoreVector& g, int n);

// Indices of the k highest predictions, ties broken by candidate order.
std::vector<int> top_k_by_score(const ScoreVector& p, int k);

// "Return K of top-N" accuracy over a set of images: the fraction of the K
// highest-predicted crops per image that land in that image's top-N
// groundtruth set, averaged over images.
double acc_k_n(const std::vector<ScoreVector>& predictions,
               const std::vector<ScoreVector>& groundtruth, int k, int n);

// Rank-weighted variant: each returned crop that lands in the top-N set
// contributes exp(-beta * (r_j - j) / n), where r_j is its ordinal
// groundtruth rank and j its position once the K returns are sorted by
// descending groundtruth score. Equals acc_k_n when the exact top-K set is
// returned.
double acc_weighted_k_n(const std::vector<ScoreVector>& predictions,
                        const std::vector<ScoreVector>& groundtruth, int k,
                        int n, double beta = 1.0);

struct MetricReport {
  double mean_pcc = 0.0;
  double mean_srcc = 0.0;
  std::map<std::pair<int, int>, double> acc;           // keyed by (K, N)
  std::map<std::pair<int, int>, double> acc_weighted;  // keyed by (K, N)
  int images = 0;
};

inline constexpr int kReportKs[] = {1, 2, 3, 4};
inline constexpr int kReportNs[] = {5, 10};

// Aggregates the full standard grid (K in 1..4, N in {5,10}) plus mean
// PCC/SRCC over images. Degenerate per-image inputs surface as errors that
// name the offending image index.
MetricReport report(const std::vector<ScoreVector>& predictions,
                    const std::vector<ScoreVector>& groundtruth,
                    double beta = 1.0);

// Human-readable aligned table.
std::string format_report_table(const MetricReport& r);
// Machine-readable "name value" lines.
std::string format_report_kv(const MetricReport& r);

}  // namespace gaic

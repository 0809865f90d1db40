#include <benchmark/benchmark.h>

#include "gaic/geometry.hpp"
#include "gaic/metrics.hpp"
#include "gaic/rng.hpp"

using namespace gaic;

static void BM_EnumerateCandidates(benchmark::State& state) {
  const ImageDims dims{static_cast<int>(state.range(0)),
                       static_cast<int>(state.range(0))};
  const GridSpec spec;
  for (auto _ : state) {
    auto crops = enumerate_candidates(dims, spec);
    benchmark::DoNotOptimize(crops);
  }
}
BENCHMARK(BM_EnumerateCandidates)->Arg(256)->Arg(1200)->Arg(4096);

static void BM_MetricReport(benchmark::State& state) {
  Rng rng(1);
  std::vector<ScoreVector> gts, preds;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    ScoreVector g(90), p(90);
    for (auto& v : g) v = rng.uniform(1.0, 5.0);
    for (auto& v : p) v = rng.uniform(1.0, 5.0);
    gts.push_back(g);
    preds.push_back(p);
  }
  for (auto _ : state) {
    auto r = report(preds, gts);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_MetricReport)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include "gaic/model.hpp"
#include "gaic/ops.hpp"
#include "gaic/rng.hpp"

using namespace gaic;
using namespace gaic::nn;

namespace {

TensorPtr random_image(int h, int w, uint64_t seed) {
  Rng rng(seed);
  auto t = make_tensor({1, 3, h, w});
  for (auto& v : t->value) v = rng.uniform(-1.5, 1.5);
  return t;
}

}  // namespace

static void BM_Conv2dForward(benchmark::State& state) {
  Rng rng(2);
  auto in = make_tensor({1, 16, 128, 128});
  auto w = make_tensor({32, 16, 3, 3});
  for (auto& v : in->value) v = rng.uniform(-1, 1);
  for (auto& v : w->value) v = rng.uniform(-1, 1);
  for (auto _ : state) {
    auto out = conv2d(nullptr, in, w, 2, 1);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * 64 * 64 * 32);
}
BENCHMARK(BM_Conv2dForward)->Unit(benchmark::kMillisecond);

static void BM_ExtractFeatures(benchmark::State& state) {
  const CropScorer model(ModelConfig{}, 3);
  auto image = random_image(256, 256, 4);
  for (auto _ : state) {
    auto f = model.extract_features(nullptr, image);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond);

static void BM_ScoreCrops(benchmark::State& state) {
  const CropScorer model(ModelConfig{}, 3);
  auto image = random_image(256, 256, 4);
  const ImageDims dims{256, 256};
  auto crops = enumerate_candidates(dims, GridSpec{});
  crops.resize(static_cast<size_t>(state.range(0)));
  auto features = model.extract_features(nullptr, image);
  for (auto _ : state) {
    auto scores = model.score_crops(features, crops, dims);
    benchmark::DoNotOptimize(scores);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreCrops)->Arg(1)->Arg(90)->Unit(benchmark::kMillisecond);

static void BM_RoiAlign(benchmark::State& state) {
  Rng rng(5);
  auto fmap = make_tensor({1, 8, 16, 16});
  for (auto& v : fmap->value) v = rng.uniform(-1, 1);
  const ImageDims dims{256, 256};
  const CropRect crop{32, 48, 224, 240};
  for (auto _ : state) {
    auto out = roi_align(nullptr, fmap, crop, dims, 9);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_RoiAlign);

BENCHMARK_MAIN();

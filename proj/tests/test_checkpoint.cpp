#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "gaic/checkpoint.hpp"
#include "gaic/rng.hpp"

using namespace gaic;
using namespace gaic::nn;

namespace {

std::string to_bytes(const CropScorer& m) {
  std::ostringstream os(std::ios::binary);
  save_checkpoint(os, m);
  return os.str();
}

CropScorer from_bytes(const std::string& bytes) {
  std::istringstream is(bytes);
  return load_checkpoint(is, "test-buffer");
}

}  // namespace

TEST_CASE("checkpoints round-trip byte-exactly") {
  ModelConfig cfg;
  cfg.backbone_channels = {6, 8, 12, 16, 24};
  cfg.reduced_channels = 4;
  cfg.align_size = 5;
  cfg.head_width = 64;
  CropScorer model(cfg, 77);
  model.mos_norm() = MosNormalization{3.217, 0.7311};
  model.set_train_seed(424242);

  const std::string bytes = to_bytes(model);
  const CropScorer loaded = from_bytes(bytes);
  CHECK(loaded.config().head_width == 64);
  CHECK(loaded.mos_norm().mean == doctest::Approx(3.217));
  CHECK(loaded.train_seed() == 424242);
  CHECK(to_bytes(loaded) == bytes);

  // Loaded parameters equal the saved ones to float32 resolution.
  const auto a = model.parameters(), b = loaded.parameters();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i]->value.size(); ++j)
      CHECK(b[i]->value[j] ==
            static_cast<double>(static_cast<float>(a[i]->value[j])));
}

TEST_CASE("loaded models score like the saved ones") {
  CropScorer model(ModelConfig{}, 5);
  model.mos_norm() = MosNormalization{2.5, 0.4};
  const CropScorer loaded = from_bytes(to_bytes(model));

  Rng rng(6);
  auto image = make_tensor({1, 3, 256, 256});
  for (auto& v : image->value) v = rng.uniform(-1.0, 1.0);
  const ImageDims dims{256, 256};
  const CropRect crops[] = {CropRect{32, 32, 224, 224}};
  const auto s1 = model.score_crops(model.extract_features(nullptr, image),
                                    crops, dims);
  const auto s2 = loaded.score_crops(loaded.extract_features(nullptr, image),
                                     crops, dims);
  CHECK(s1[0] == doctest::Approx(s2[0]).epsilon(1e-4));
}

TEST_CASE("malformed checkpoints are rejected with context") {
  CropScorer model(ModelConfig{}, 1);
  std::string bytes = to_bytes(model);

  SUBCASE("wrong magic") {
    bytes[5] = 'X';
    CHECK_THROWS_AS(from_bytes(bytes), Error);
  }
  SUBCASE("truncated data") {
    bytes.resize(bytes.size() - 100);
    CHECK_THROWS_AS(from_bytes(bytes), Error);
  }
  SUBCASE("tensor count mismatch") {
    const auto pos = bytes.find("tensors 18");
    REQUIRE(pos != std::string::npos);
    bytes.replace(pos, 10, "tensors 17");
    CHECK_THROWS_AS(from_bytes(bytes), Error);
  }
}

TEST_CASE("parameter blob alone round-trips") {
  Rng rng(8);
  auto t1 = make_tensor({2, 3});
  auto t2 = make_tensor({4});
  for (auto& v : t1->value) v = rng.uniform(-2, 2);
  for (auto& v : t2->value) v = rng.uniform(-2, 2);
  const TensorPtr params[] = {t1, t2};
  const std::string names[] = {"a.w", "b.w"};

  std::ostringstream os(std::ios::binary);
  save_parameters(os, params, names);
  const std::string blob = os.str();

  auto r1 = make_tensor({2, 3});
  auto r2 = make_tensor({4});
  const TensorPtr loaded[] = {r1, r2};
  std::istringstream is(blob);
  load_parameters(is, loaded, names, "blob");
  for (size_t i = 0; i < r1->value.size(); ++i)
    CHECK(r1->value[i] == static_cast<double>(static_cast<float>(t1->value[i])));

  std::ostringstream os2(std::ios::binary);
  save_parameters(os2, loaded, names);
  CHECK(os2.str() == blob);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaic/metrics.hpp"
#include "gaic/rng.hpp"
#include "support/oracles.hpp"

using namespace gaic;

namespace {

ScoreVector random_scores(Rng& rng, int n, double lo = 1.0, double hi = 5.0) {
  ScoreVector v(static_cast<size_t>(n));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("fractional ranks") {
  CHECK(rank({5, 3, 4}) == std::vector<double>{1, 3, 2});
  CHECK(rank({4, 4, 1}) == std::vector<double>{1.5, 1.5, 3});
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    auto v = random_scores(rng, 20);
    if (t % 3 == 0) v[3] = v[11] = v[17];  // force ties
    CHECK(rank(v) == oracle::rank_direct(v));
  }
}

TEST_CASE("pcc identities, oracle match, degenerate error") {
  const ScoreVector g{1, 2, 3, 4};
  CHECK(pcc(g, g) == doctest::Approx(1.0));
  ScoreVector neg;
  for (double v : g) neg.push_back(-v);
  CHECK(pcc(g, neg) == doctest::Approx(-1.0));

  const ScoreVector p{1, 2, 4, 3};
  CHECK(std::abs(pcc(g, p) - oracle::pcc_direct(g, p)) < 1e-12);

  CHECK_THROWS_AS(pcc({2, 2, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(pcc({1, 2, 3}, {7, 7, 7}), Error);
  CHECK_THROWS_AS(pcc({1}, {2}), Error);
  CHECK_THROWS_AS(pcc({1, 2}, {1, 2, 3}), Error);
}

TEST_CASE("pcc is invariant under positive affine transforms") {
  Rng rng(9);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_scores(rng, 30);
    const auto p = random_scores(rng, 30);
    ScoreVector p2;
    const double a = rng.uniform(0.1, 5.0), b = rng.uniform(-3.0, 3.0);
    for (double v : p) p2.push_back(a * v + b);
    CHECK(pcc(g, p2) == doctest::Approx(pcc(g, p)).epsilon(1e-12));
  }
}

TEST_CASE("srcc identities, ties, monotone invariance") {
  const ScoreVector g{1, 2, 3, 4, 5};
  ScoreVector cube;
  for (double v : g) cube.push_back(v * v * v - 2.0);  // strictly increasing
  CHECK(srcc(g, cube) == doctest::Approx(1.0));
  ScoreVector rev(g.rbegin(), g.rend());
  CHECK(srcc(g, rev) == doctest::Approx(-1.0));

  const ScoreVector tg{1, 2, 2, 3}, tp{1, 3, 2, 4};
  CHECK(std::abs(srcc(tg, tp) - oracle::srcc_direct(tg, tp)) < 1e-12);
  CHECK(rank(tg) == std::vector<double>{4, 2.5, 2.5, 1});

  Rng rng(13);
  for (int t = 0; t < 40; ++t) {
    const auto a = random_scores(rng, 25);
    const auto b = random_scores(rng, 25);
    ScoreVector a2;
    for (double v : a) a2.push_back(std::exp(0.7 * v) + 1.0);
    CHECK(srcc(a2, b) == doctest::Approx(srcc(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("top-N set with boundary ties") {
  CHECK(top_n_set({5, 4, 3, 2, 1}, 2) == std::vector<int>{0, 1});
  CHECK(top_n_set({5, 4, 4, 2}, 2) == std::vector<int>{0, 1, 2});
  Rng rng(3);
  for (int t = 0; t < 60; ++t) {
    auto g = random_scores(rng, 15);
    if (t % 2 == 0) g[2] = g[9];
    const int n = static_cast<int>(rng.uniform_int(1, 15));
    CHECK(top_n_set(g, n) == oracle::top_n_direct(g, n));
  }
  CHECK_THROWS_AS(top_n_set({1, 2}, 3), Error);
}

TEST_CASE("the worked accuracy example: returns ranked {2,5,3,10}") {
  // One image, ten candidates with distinct descending MOS; predictions
  // pick the crops of groundtruth rank 2, 5, 3 and 10, in that order.
  ScoreVector gt;
  for (int i = 0; i < 10; ++i) gt.push_back(10.0 - i);  // rank i+1 at index i
  ScoreVector pred(10, 0.0);
  pred[1] = 4.0;  // rank 2
  pred[4] = 3.0;  // rank 5
  pred[2] = 2.0;  // rank 3
  pred[9] = 1.0;  // rank 10
  const std::vector<ScoreVector> preds{pred}, gts{gt};

  CHECK(acc_k_n(preds, gts, 4, 5) == doctest::Approx(0.75));
  const double expected =
      (std::exp(-1.0 / 5) + std::exp(-1.0 / 5) + std::exp(-2.0 / 5)) / 4.0;
  CHECK(acc_weighted_k_n(preds, gts, 4, 5) == doctest::Approx(expected));
  CHECK(acc_weighted_k_n(preds, gts, 4, 5) ==
        doctest::Approx(0.5769).epsilon(2e-4));
}

TEST_CASE("perfect predictions reach 1.0 on every accuracy index") {
  Rng rng(21);
  std::vector<ScoreVector> gts;
  for (int i = 0; i < 6; ++i) gts.push_back(random_scores(rng, 40));
  for (int k = 1; k <= 4; ++k)
    for (int n : {5, 10}) {
      CHECK(acc_k_n(gts, gts, k, n) == doctest::Approx(1.0));
      CHECK(acc_weighted_k_n(gts, gts, k, n) == doctest::Approx(1.0));
    }
}

TEST_CASE("accuracy metrics match the step-by-step oracles") {
  Rng rng(31);
  for (int t = 0; t < 60; ++t) {
    std::vector<ScoreVector> preds, gts;
    const int images = static_cast<int>(rng.uniform_int(1, 5));
    for (int i = 0; i < images; ++i) {
      const int n = static_cast<int>(rng.uniform_int(12, 90));
      auto g = random_scores(rng, n);
      auto p = random_scores(rng, n);
      if (t % 4 == 0) {  // inject MOS ties
        g[1] = g[5];
        g[2] = g[7] = g[9];
      }
      gts.push_back(std::move(g));
      preds.push_back(std::move(p));
    }
    for (int k = 1; k <= 4; ++k)
      for (int n : {5, 10}) {
        const double a = acc_k_n(preds, gts, k, n);
        const double aw = acc_weighted_k_n(preds, gts, k, n);
        CHECK(std::abs(a - oracle::acc_direct(preds, gts, k, n)) < 1e-12);
        CHECK(std::abs(aw - oracle::acc_weighted_direct(preds, gts, k, n, 1.0)) <
              1e-12);
        // Each weight is at most one.
        CHECK(aw <= a + 1e-12);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
      }
  }
}

TEST_CASE("accuracy is invariant to increasing transforms of predictions") {
  Rng rng(37);
  std::vector<ScoreVector> preds, gts;
  for (int i = 0; i < 4; ++i) {
    gts.push_back(random_scores(rng, 50));
    preds.push_back(random_scores(rng, 50));
  }
  auto warped = preds;
  for (auto& v : warped)
    for (auto& x : v) x = std::atan(2.0 * x) * 10.0;
  for (int k = 1; k <= 4; ++k)
    for (int n : {5, 10})
      CHECK(acc_k_n(preds, gts, k, n) == acc_k_n(warped, gts, k, n));
}

TEST_CASE("errors on images with too few candidates") {
  const std::vector<ScoreVector> preds{{1, 2, 3}}, gts{{3, 2, 1}};
  CHECK_THROWS_AS(acc_k_n(preds, gts, 4, 5), Error);
  CHECK_THROWS_AS(acc_weighted_k_n(preds, gts, 1, 5), Error);
}

TEST_CASE("report aggregates the standard grid") {
  Rng rng(41);
  SUBCASE("perfect single image") {
    std::vector<ScoreVector> gt{random_scores(rng, 30)};
    const auto r = report(gt, gt);
    CHECK(r.images == 1);
    CHECK(r.mean_srcc == doctest::Approx(1.0));
    CHECK(r.mean_pcc == doctest::Approx(1.0));
    for (const auto& [key, v] : r.acc) CHECK(v == doctest::Approx(1.0));
    for (const auto& [key, v] : r.acc_weighted) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("two images equal the mean of the per-image metrics") {
    std::vector<ScoreVector> gts{random_scores(rng, 20), random_scores(rng, 25)};
    std::vector<ScoreVector> preds{random_scores(rng, 20), random_scores(rng, 25)};
    const auto r = report(preds, gts);
    const double p0 = pcc(gts[0], preds[0]);
    const double p1 = pcc(gts[1], preds[1]);
    CHECK(r.mean_pcc == doctest::Approx(0.5 * (p0 + p1)).epsilon(1e-12));
    const double s0 = srcc(gts[0], preds[0]);
    const double s1 = srcc(gts[1], preds[1]);
    CHECK(r.mean_srcc == doctest::Approx(0.5 * (s0 + s1)).epsilon(1e-12));
  }
  SUBCASE("permutation invariance over image order") {
    std::vector<ScoreVector> gts, preds;
    for (int i = 0; i < 5; ++i) {
      gts.push_back(random_scores(rng, 30));
      preds.push_back(random_scores(rng, 30));
    }
    const auto r1 = report(preds, gts);
    std::reverse(gts.begin(), gts.end());
    std::reverse(preds.begin(), preds.end());
    const auto r2 = report(preds, gts);
    CHECK(r1.mean_srcc == doctest::Approx(r2.mean_srcc).epsilon(1e-12));
    CHECK(r1.mean_pcc == doctest::Approx(r2.mean_pcc).epsilon(1e-12));
    for (const auto& [key, v] : r1.acc)
      CHECK(v == doctest::Approx(r2.acc.at(key)).epsilon(1e-12));
  }
  SUBCASE("degenerate image is named") {
    std::vector<ScoreVector> gts{random_scores(rng, 12), ScoreVector(12, 3.0)};
    std::vector<ScoreVector> preds{random_scores(rng, 12), random_scores(rng, 12)};
    try {
      report(preds, gts);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("image 1") != std::string::npos);
    }
  }
}

TEST_CASE("report serialization carries every index") {
  Rng rng(43);
  std::vector<ScoreVector> gt{random_scores(rng, 30)};
  const auto r = report(gt, gt);
  const auto kv = format_report_kv(r);
  CHECK(kv.find("srcc 1.000000000000") != std::string::npos);
  CHECK(kv.find("acc_4_10 1.000000000000") != std::string::npos);
  CHECK(kv.find("acc_w_1_5 1.000000000000") != std::string::npos);
  const auto table = format_report_table(r);
  CHECK(table.find("K4/N10") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gaic/augment.hpp"
#include "gaic/image.hpp"
#include "gaic/preprocess.hpp"
#include "gaic/rng.hpp"

using namespace gaic;

namespace {

std::string to_bytes(const RawImage& img) {
  std::ostringstream os;
  write_ppm(os, img);
  return os.str();
}

RawImage from_bytes(const std::string& bytes) {
  std::istringstream is(bytes);
  return read_ppm(is);
}

RawImage noise_image(int h, int w, uint64_t seed) {
  RawImage img = make_image(h, w);
  Rng rng(seed);
  for (auto& b : img.pixels) b = static_cast<uint8_t>(rng.uniform_int(0, 255));
  return img;
}

}  // namespace

TEST_CASE("ppm: 1x1 white pixel") {
  const std::string file = std::string("P6\n1 1\n255\n") + "\xff\xff\xff";
  const RawImage img = from_bytes(file);
  CHECK(img.height == 1);
  CHECK(img.width == 1);
  CHECK(img.pixels == std::vector<uint8_t>{255, 255, 255});
}

TEST_CASE("ppm: canonical file round-trips byte-exactly") {
  const RawImage img = noise_image(2, 2, 5);
  const std::string bytes = to_bytes(img);
  CHECK(to_bytes(from_bytes(bytes)) == bytes);
}

TEST_CASE("ppm: comments and loose whitespace parse like the canonical form") {
  RawImage img = make_image(2, 3, 10, 200, 30);
  img.px(1, 2)[0] = 99;
  const std::string canonical = to_bytes(img);
  std::string payload(canonical.begin() + canonical.find("255\n") + 4,
                      canonical.end());
  const std::string commented = "P6 # binary pixmap\n# extents follow\n  3\t2 "
                                "# width height\n255\n" +
                                payload;
  const RawImage parsed = from_bytes(commented);
  CHECK(to_bytes(parsed) == canonical);
}

TEST_CASE("ppm: malformed inputs are rejected") {
  CHECK_THROWS_AS(from_bytes("P5\n1 1\n255\nxxx"), Error);       // wrong magic
  CHECK_THROWS_AS(from_bytes("P6\n1 1\n65535\nxx"), Error);      // bad maxval
  CHECK_THROWS_AS(from_bytes("P6\n2 2\n255\nshort"), Error);     // truncated
  CHECK_THROWS_AS(from_bytes("P6\n-1 2\n255\nxxx"), Error);      // bad extent
  CHECK_THROWS_AS(from_bytes("P6\n1"), Error);                   // truncated header
}

TEST_CASE("crop_image and flip_horizontal") {
  RawImage img = noise_image(10, 12, 6);
  const CropRect r{2, 3, 7, 9};
  const RawImage cut = crop_image(img, r);
  CHECK(cut.height == 5);
  CHECK(cut.width == 6);
  for (int row = 0; row < 5; ++row)
    for (int col = 0; col < 6; ++col)
      for (int ch = 0; ch < 3; ++ch)
        CHECK(cut.px(row, col)[ch] == img.px(row + 2, col + 3)[ch]);
  CHECK_THROWS_AS(crop_image(img, CropRect{0, 0, 11, 5}), Error);

  const RawImage flipped = flip_horizontal(img);
  CHECK(flipped.px(4, 0)[1] == img.px(4, 11)[1]);
  const RawImage twice = flip_horizontal(flipped);
  CHECK(twice.pixels == img.pixels);
}

TEST_CASE("preprocess: scaling, shape and crop mapping") {
  SUBCASE("uniform halving of a square image") {
    const auto pre = preprocess(noise_image(512, 512, 7));
    CHECK(pre.scaled == ImageDims{256, 256});
    CHECK(pre.tensor->shape == std::vector<int>{1, 3, 256, 256});
    CHECK(pre.map_crop(CropRect{0, 0, 512, 512}) == CropRect{0, 0, 256, 256});
    CHECK(pre.map_crop(CropRect{64, 128, 256, 384}) ==
          CropRect{32, 64, 128, 192});
  }
  SUBCASE("short side already at target: spatial extents unchanged") {
    const auto pre = preprocess(noise_image(256, 400, 8));
    CHECK(pre.scaled == ImageDims{256, 400});
    CHECK(pre.map_crop(CropRect{10, 20, 200, 300}) ==
          CropRect{10, 20, 200, 300});
  }
  SUBCASE("portrait orientation scales the width side") {
    const auto pre = preprocess(noise_image(400, 256, 8));
    CHECK(pre.scaled == ImageDims{400, 256});
    const auto pre2 = preprocess(noise_image(512, 384, 8));
    CHECK(pre2.scaled.width == 256);
    CHECK(pre2.scaled.height == std::lround(512 * 256.0 / 384));
  }
  SUBCASE("constant-gray image hits the declared normalization constants") {
    const auto pre = preprocess(make_image(300, 300, 128, 128, 128));
    const ChannelNorm norm;
    const size_t plane = 256 * 256;
    for (int ch = 0; ch < 3; ++ch) {
      const double want = (128 / 255.0 - norm.mean[ch]) / norm.stddev[ch];
      CHECK(pre.tensor->value[ch * plane] ==
            doctest::Approx(want).epsilon(1e-12));
      CHECK(pre.tensor->value[(ch + 1) * plane - 1] ==
            doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("degenerate images are rejected") {
    CHECK_THROWS_AS(preprocess(make_image(1, 100)), Error);
    CHECK_THROWS_AS(preprocess(make_image(100, 1)), Error);
  }
  SUBCASE("relative crop area survives preprocessing within edge rounding") {
    Rng rng(9);
    const RawImage img = noise_image(480, 720, 10);
    const auto pre = preprocess(img);
    for (int t = 0; t < 50; ++t) {
      CropRect c;
      c.x1 = static_cast<int>(rng.uniform_int(0, 400));
      c.x2 = static_cast<int>(rng.uniform_int(c.x1 + 40, 480));
      c.y1 = static_cast<int>(rng.uniform_int(0, 600));
      c.y2 = static_cast<int>(rng.uniform_int(c.y1 + 40, 720));
      const auto m = pre.map_crop(c);
      const double frac_before =
          static_cast<double>(crop_area(c)) / (480.0 * 720.0);
      const double frac_after = static_cast<double>(crop_area(m)) /
                                (pre.scaled.height * static_cast<double>(pre.scaled.width));
      // One pixel per edge at the scaled size bounds the drift.
      const double tol = (m.height() + m.width() + 2.0) /
                         (pre.scaled.height * static_cast<double>(pre.scaled.width));
      CHECK(std::abs(frac_before - frac_after) <= tol);
    }
  }
}

TEST_CASE("augment: involution, identity, crop mapping") {
  Rng seed_rng(11);
  const RawImage img = noise_image(120, 160, 12);
  std::vector<CropMos> crops;
  crops.push_back({CropRect{10, 20, 100, 140}, 4.2});
  crops.push_back({CropRect{0, 0, 120, 160}, 3.1});

  SUBCASE("zero-width ranges with certain flip: flipping twice restores") {
    AugmentRanges identity_jitter;
    identity_jitter.brightness_min = identity_jitter.brightness_max = 1.0;
    identity_jitter.contrast_min = identity_jitter.contrast_max = 1.0;
    identity_jitter.saturation_min = identity_jitter.saturation_max = 1.0;
    identity_jitter.hue_min = identity_jitter.hue_max = 0.0;
    identity_jitter.flip_prob = 1.0;
    Rng rng(1);
    const auto once = augment(img, crops, rng, identity_jitter);
    const auto twice = augment(once.image, once.crops, rng, identity_jitter);
    CHECK(twice.image.pixels == img.pixels);
    REQUIRE(twice.crops.size() == crops.size());
    for (size_t i = 0; i < crops.size(); ++i) {
      CHECK(twice.crops[i].rect == crops[i].rect);
      CHECK(twice.crops[i].mos == crops[i].mos);
    }
    // One flip maps (x1,y1,x2,y2) -> (x1, W-y2, x2, W-y1).
    CHECK(once.crops[0].rect == CropRect{10, 160 - 140, 100, 160 - 20});
  }

  SUBCASE("zero-width ranges without flip: exact identity") {
    AugmentRanges none;
    none.brightness_min = none.brightness_max = 1.0;
    none.contrast_min = none.contrast_max = 1.0;
    none.saturation_min = none.saturation_max = 1.0;
    none.hue_min = none.hue_max = 0.0;
    none.flip_prob = 0.0;
    Rng rng(2);
    const auto out = augment(img, crops, rng, none);
    CHECK(out.image.pixels == img.pixels);
    CHECK(out.crops[0].rect == crops[0].rect);
  }

  SUBCASE("jitter preserves scores, count and rect validity") {
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
      std::vector<CropMos> random_crops;
      for (int i = 0; i < 8; ++i) {
        CropRect c;
        c.x1 = static_cast<int>(rng.uniform_int(0, 100));
        c.x2 = static_cast<int>(rng.uniform_int(c.x1 + 1, 120));
        c.y1 = static_cast<int>(rng.uniform_int(0, 140));
        c.y2 = static_cast<int>(rng.uniform_int(c.y1 + 1, 160));
        random_crops.push_back({c, rng.uniform(1.0, 5.0)});
      }
      const auto out = augment(img, random_crops, rng);
      REQUIRE(out.crops.size() == random_crops.size());
      for (size_t i = 0; i < out.crops.size(); ++i) {
        CHECK(out.crops[i].mos == random_crops[i].mos);
        CHECK_NOTHROW(validate_crop(out.crops[i].rect, img.dims()));
        CHECK(out.crops[i].rect.height() == random_crops[i].rect.height());
        CHECK(out.crops[i].rect.width() == random_crops[i].rect.width());
      }
      CHECK(out.image.height == img.height);
      CHECK(out.image.width == img.width);
    }
  }
}

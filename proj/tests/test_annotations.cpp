#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "gaic/annotations.hpp"
#include "gaic/geometry.hpp"
#include "gaic/rng.hpp"

using namespace gaic;

namespace {

std::string to_text(const std::vector<AnnotatedImage>& anns) {
  std::ostringstream os;
  write_annotations(os, anns);
  return os.str();
}

std::vector<AnnotatedImage> from_text(const std::string& text) {
  std::istringstream is(text);
  return read_annotations(is, "test-buffer");
}

}  // namespace

TEST_CASE("empty list round-trips through a header-only file") {
  const std::string text = to_text({});
  CHECK(text == "GAIC-ANN v1\n");
  CHECK(from_text(text).empty());
}

TEST_CASE("one image with 90 crops round-trips field-exactly") {
  AnnotatedImage img;
  img.path = "scene_01.ppm";
  img.dims = ImageDims{600, 800};
  Rng rng(1);
  const auto candidates = enumerate_candidates(img.dims, GridSpec{});
  for (const auto& c : candidates)
    img.crops.push_back({c, std::floor(rng.uniform(1.0, 5.0) * 1e4) / 1e4});

  const std::string text = to_text({img});
  const auto back = from_text(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].path == img.path);
  CHECK(back[0].dims == img.dims);
  CHECK(back[0].prediction == false);
  REQUIRE(back[0].crops.size() == img.crops.size());
  for (size_t i = 0; i < img.crops.size(); ++i) {
    CHECK(back[0].crops[i].rect == img.crops[i].rect);
    CHECK(back[0].crops[i].mos == doctest::Approx(img.crops[i].mos).epsilon(1e-12));
  }
  // Re-serialization is byte-identical once scores are 4-decimal.
  CHECK(to_text(back) == text);
}

TEST_CASE("prediction records carry unconstrained scores") {
  AnnotatedImage pred;
  pred.path = "scene_02.ppm";
  pred.dims = ImageDims{100, 100};
  pred.prediction = true;
  pred.crops.push_back({CropRect{0, 0, 50, 50}, -2.75});
  pred.crops.push_back({CropRect{10, 10, 90, 90}, 7.5});
  const auto back = from_text(to_text({pred}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].prediction);
  CHECK(back[0].crops[0].mos == doctest::Approx(-2.75));
}

TEST_CASE("validation errors name the file, line and image") {
  SUBCASE("crop exceeding the declared extents") {
    const std::string text =
        "GAIC-ANN v1\nIMG photo.ppm 100 100 1\n0 0 101 50 3.0000\n";
    try {
      from_text(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("test-buffer:3") != std::string::npos);
      CHECK(msg.find("photo.ppm") != std::string::npos);
    }
  }
  SUBCASE("MOS outside [1,5]") {
    CHECK_THROWS_AS(
        from_text("GAIC-ANN v1\nIMG a.ppm 100 100 1\n0 0 50 50 5.5000\n"),
        Error);
    CHECK_THROWS_AS(
        from_text("GAIC-ANN v1\nIMG a.ppm 100 100 1\n0 0 50 50 0.9990\n"),
        Error);
  }
  SUBCASE("unknown version line") {
    CHECK_THROWS_AS(from_text("GAIC-ANN v2\n"), Error);
    CHECK_THROWS_AS(from_text(""), Error);
  }
  SUBCASE("truncated crop list") {
    CHECK_THROWS_AS(
        from_text("GAIC-ANN v1\nIMG a.ppm 100 100 2\n0 0 50 50 3.0000\n"),
        Error);
  }
  SUBCASE("malformed crop line") {
    CHECK_THROWS_AS(
        from_text("GAIC-ANN v1\nIMG a.ppm 100 100 1\n0 0 fifty 50 3.0\n"),
        Error);
  }
}

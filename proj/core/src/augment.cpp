#include "gaic/augment.hpp"

#include <algorithm>
#include <cmath>

namespace gaic {

namespace {

inline uint8_t to_byte(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

inline double luma(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

void adjust_brightness(RawImage& img, double f) {
  for (auto& b : img.pixels) b = to_byte(b * f);
}

void adjust_contrast(RawImage& img, double f) {
  double mean = 0.0;
  for (size_t p = 0; p < img.pixels.size(); p += 3)
    mean += luma(img.pixels[p], img.pixels[p + 1], img.pixels[p + 2]);
  mean /= static_cast<double>(img.pixels.size() / 3);
  for (auto& b : img.pixels) b = to_byte(mean + (b - mean) * f);
}

void adjust_saturation(RawImage& img, double f) {
  for (size_t p = 0; p < img.pixels.size(); p += 3) {
    const double l =
        luma(img.pixels[p], img.pixels[p + 1], img.pixels[p + 2]);
    for (int c = 0; c < 3; ++c)
      img.pixels[p + c] = to_byte(l + (img.pixels[p + c] - l) * f);
  }
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s,
                double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  v = mx;
  s = mx == 0.0 ? 0.0 : d / mx;
  if (d == 0.0) {
    h = 0.0;
  } else if (mx == r) {
    h = std::fmod((g - b) / d, 6.0);
  } else if (mx == g) {
    h = (b - r) / d + 2.0;
  } else {
    h = (r - g) / d + 4.0;
  }
  h /= 6.0;
  if (h < 0.0) h += 1.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g,
                double& b) {
  const double hh = std::fmod(h, 1.0) * 6.0;
  const int sector = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

void adjust_hue(RawImage& img, double turns) {
  for (size_t p = 0; p < img.pixels.size(); p += 3) {
    double h, s, v, r, g, b;
    rgb_to_hsv(img.pixels[p] / 255.0, img.pixels[p + 1] / 255.0,
               img.pixels[p + 2] / 255.0, h, s, v);
    h = std::fmod(h + turns + 1.0, 1.0);
    hsv_to_rgb(h, s, v, r, g, b);
    img.pixels[p] = to_byte(r * 255.0);
    img.pixels[p + 1] = to_byte(g * 255.0);
    img.pixels[p + 2] = to_byte(b * 255.0);
  }
}

}  // namespace

AugmentedSample augment(const RawImage& img, std::span<const CropMos> crops,
                        Rng& rng, const AugmentRanges& ranges) {
  // All draws happen up front in a fixed order, so the stream consumption
  // does not depend on which adjustments are identity.
  const double brightness =
      rng.uniform(ranges.brightness_min, ranges.brightness_max);
  const double contrast = rng.uniform(ranges.contrast_min, ranges.contrast_max);
  const double saturation =
      rng.uniform(ranges.saturation_min, ranges.saturation_max);
  const double hue = rng.uniform(ranges.hue_min, ranges.hue_max);
  const bool flip = rng.bernoulli(ranges.flip_prob);

  AugmentedSample out;
  out.image = img;
  out.crops.assign(crops.begin(), crops.end());
  for (const auto& c : crops) validate_crop(c.rect, img.dims());

  if (brightness != 1.0) adjust_brightness(out.image, brightness);
  if (contrast != 1.0) adjust_contrast(out.image, contrast);
  if (saturation != 1.0) adjust_saturation(out.image, saturation);
  if (hue != 0.0) adjust_hue(out.image, hue);
  if (flip) {
    out.image = flip_horizontal(out.image);
    const int w = img.width;
    for (auto& c : out.crops) {
      const int y1 = w - c.rect.y2;
      const int y2 = w - c.rect.y1;
      c.rect.y1 = y1;
      c.rect.y2 = y2;
    }
  }
  return out;
}

}  // namespace gaic

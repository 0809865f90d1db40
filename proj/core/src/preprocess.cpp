#include "gaic/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace gaic {

namespace {

// Half-pixel-center bilinear resize of one channel plane held as doubles.
void resize_plane(const std::vector<double>& src, int in_h, int in_w,
                  std::vector<double>& dst, int out_h, int out_w) {
  const double sr = static_cast<double>(in_h) / out_h;
  const double sc = static_cast<double>(in_w) / out_w;
  for (int r = 0; r < out_h; ++r) {
    double fr = (r + 0.5) * sr - 0.5;
    fr = std::min(std::max(fr, 0.0), static_cast<double>(in_h - 1));
    const int r0 = static_cast<int>(fr);
    const int r1 = std::min(r0 + 1, in_h - 1);
    const double wr = fr - r0;
    for (int c = 0; c < out_w; ++c) {
      double fc = (c + 0.5) * sc - 0.5;
      fc = std::min(std::max(fc, 0.0), static_cast<double>(in_w - 1));
      const int c0 = static_cast<int>(fc);
      const int c1 = std::min(c0 + 1, in_w - 1);
      const double wc = fc - c0;
      const double top = src[static_cast<size_t>(r0) * in_w + c0] * (1 - wc) +
                         src[static_cast<size_t>(r0) * in_w + c1] * wc;
      const double bot = src[static_cast<size_t>(r1) * in_w + c0] * (1 - wc) +
                         src[static_cast<size_t>(r1) * in_w + c1] * wc;
      dst[static_cast<size_t>(r) * out_w + c] = top * (1 - wr) + bot * wr;
    }
  }
}

}  // namespace

CropRect PreprocessedImage::map_crop(const CropRect& crop) const {
  validate_crop(crop, source);
  const double sr = static_cast<double>(scaled.height) / source.height;
  const double sc = static_cast<double>(scaled.width) / source.width;
  CropRect out;
  out.x1 = static_cast<int>(std::llround(crop.x1 * sr));
  out.y1 = static_cast<int>(std::llround(crop.y1 * sc));
  out.x2 = static_cast<int>(std::llround(crop.x2 * sr));
  out.y2 = static_cast<int>(std::llround(crop.y2 * sc));
  out.x1 = std::clamp(out.x1, 0, scaled.height - 1);
  out.y1 = std::clamp(out.y1, 0, scaled.width - 1);
  out.x2 = std::clamp(out.x2, out.x1 + 1, scaled.height);
  out.y2 = std::clamp(out.y2, out.y1 + 1, scaled.width);
  return out;
}

PreprocessedImage preprocess(const RawImage& img, int short_side,
                             const ChannelNorm& norm) {
  if (img.height < 2 || img.width < 2)
    throw Error("preprocess: image " + std::to_string(img.height) + "x" +
                std::to_string(img.width) + " is degenerate");
  if (short_side < 1) throw Error("preprocess: short_side must be positive");

  const int short_in = std::min(img.height, img.width);
  const double scale = static_cast<double>(short_side) / short_in;
  int out_h, out_w;
  if (img.height <= img.width) {
    out_h = short_side;
    out_w = std::max(short_side,
                     static_cast<int>(std::llround(img.width * scale)));
  } else {
    out_w = short_side;
    out_h = std::max(short_side,
                     static_cast<int>(std::llround(img.height * scale)));
  }

  // Channel planes in [0,1].
  const size_t in_plane = static_cast<size_t>(img.height) * img.width;
  std::vector<std::vector<double>> planes(3,
                                          std::vector<double>(in_plane));
  for (size_t p = 0; p < in_plane; ++p) {
    planes[0][p] = img.pixels[p * 3] / 255.0;
    planes[1][p] = img.pixels[p * 3 + 1] / 255.0;
    planes[2][p] = img.pixels[p * 3 + 2] / 255.0;
  }

  PreprocessedImage out;
  out.source = img.dims();
  out.scaled = ImageDims{out_h, out_w};
  out.tensor = nn::make_tensor({1, 3, out_h, out_w});
  const size_t out_plane = static_cast<size_t>(out_h) * out_w;
  std::vector<double> resized(out_plane);
  for (int ch = 0; ch < 3; ++ch) {
    if (out_h == img.height && out_w == img.width) {
      resized = planes[ch];
    } else {
      resize_plane(planes[ch], img.height, img.width, resized, out_h, out_w);
    }
    double* dst = out.tensor->value.data() + static_cast<size_t>(ch) * out_plane;
    const double mean = norm.mean[static_cast<size_t>(ch)];
    const double inv_std = 1.0 / norm.stddev[static_cast<size_t>(ch)];
    for (size_t p = 0; p < out_plane; ++p)
      dst[p] = (resized[p] - mean) * inv_std;
  }
  return out;
}

}  // namespace gaic

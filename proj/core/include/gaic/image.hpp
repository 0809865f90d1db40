#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gaic/geometry.hpp"

namespace gaic {

// 8-bit RGB raster, row-major, three bytes per pixel.
struct RawImage {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> pixels;

  ImageDims dims() const { return ImageDims{height, width}; }
  size_t offset(int r, int c) const {
    return (static_cast<size_t>(r) * width + c) * 3;
  }
  uint8_t* px(int r, int c) { return pixels.data() + offset(r, c); }
  const uint8_t* px(int r, int c) const { return pixels.data() + offset(r, c); }
};

RawImage make_image(int height, int width, uint8_t r = 0, uint8_t g = 0,
                    uint8_t b = 0);

// Binary portable pixmap (P6), maxval 255 only. The reader accepts comments
// and arbitrary header whitespace; the writer emits the canonical single
// whitespace form, so canonical files round-trip byte-exactly.
RawImage read_ppm(std::istream& in);
RawImage read_ppm(const std::string& path);
void write_ppm(std::ostream& out, const RawImage& img);
void write_ppm(const std::string& path, const RawImage& img);

RawImage crop_image(const RawImage& img, const CropRect& crop);
RawImage flip_horizontal(const RawImage& img);

}  // namespace gaic

#include "gaic/image.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace gaic {

RawImage make_image(int height, int width, uint8_t r, uint8_t g, uint8_t b) {
  if (height < 1 || width < 1)
    throw Error("make_image: extents must be positive");
  RawImage img;
  img.height = height;
  img.width = width;
  img.pixels.resize(static_cast<size_t>(height) * width * 3);
  for (size_t i = 0; i < img.pixels.size(); i += 3) {
    img.pixels[i] = r;
    img.pixels[i + 1] = g;
    img.pixels[i + 2] = b;
  }
  return img;
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) continue;
    break;
  }
  if (ch == EOF) throw Error("ppm: truncated header");
  tok.push_back(static_cast<char>(ch));
  while ((ch = in.get()) != EOF && !std::isspace(ch) && ch != '#')
    tok.push_back(static_cast<char>(ch));
  if (ch == '#') {
    while ((ch = in.get()) != EOF && ch != '\n') {
    }
  }
  return tok;
}

int parse_header_int(std::istream& in, const char* field) {
  const std::string tok = next_header_token(in);
  try {
    size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(std::string("ppm: invalid ") + field + " '" + tok + "'");
  }
}

}  // namespace

RawImage read_ppm(std::istream& in) {
  const std::string magic = next_header_token(in);
  if (magic != "P6")
    throw Error("ppm: expected magic 'P6', got '" + magic + "'");
  RawImage img;
  img.width = parse_header_int(in, "width");
  img.height = parse_header_int(in, "height");
  const int maxval = parse_header_int(in, "maxval");
  if (img.width < 1 || img.height < 1)
    throw Error("ppm: non-positive image extents");
  if (maxval != 255)
    throw Error("ppm: only maxval 255 is supported, got " +
                std::to_string(maxval));
  // next_header_token consumed exactly one whitespace after maxval (or a
  // comment's trailing newline); the payload starts here.
  const size_t n = static_cast<size_t>(img.width) * img.height * 3;
  img.pixels.resize(n);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n)
    throw Error("ppm: truncated pixel payload, expected " + std::to_string(n) +
                " bytes, got " + std::to_string(in.gcount()));
  return img;
}

RawImage read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open image file '" + path + "'");
  try {
    return read_ppm(f);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_ppm(std::ostream& out, const RawImage& img) {
  if (img.pixels.size() != static_cast<size_t>(img.height) * img.width * 3)
    throw Error("ppm: pixel buffer does not match image extents");
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

void write_ppm(const std::string& path, const RawImage& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_ppm(f, img);
  if (!f) throw Error("failed writing image '" + path + "'");
}

RawImage crop_image(const RawImage& img, const CropRect& crop) {
  validate_crop(crop, img.dims());
  RawImage out;
  out.height = crop.height();
  out.width = crop.width();
  out.pixels.resize(static_cast<size_t>(out.height) * out.width * 3);
  for (int r = 0; r < out.height; ++r) {
    const uint8_t* src = img.px(crop.x1 + r, crop.y1);
    std::copy(src, src + static_cast<size_t>(out.width) * 3,
              out.pixels.begin() + out.offset(r, 0));
  }
  return out;
}

RawImage flip_horizontal(const RawImage& img) {
  RawImage out;
  out.height = img.height;
  out.width = img.width;
  out.pixels.resize(img.pixels.size());
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const uint8_t* src = img.px(r, img.width - 1 - c);
      uint8_t* dst = out.px(r, c);
      dst[0] = src[0];
      dst[1] = src[1];
      dst[2] = src[2];
    }
  return out;
}

}  // namespace gaic

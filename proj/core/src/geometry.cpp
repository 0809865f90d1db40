#include "gaic/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gaic {

double GridSpec::min_area_lower_bound() const {
  return static_cast<double>(rows - 2 * corner_rows + 1) *
         static_cast<double>(cols - 2 * corner_cols + 1) /
         (static_cast<double>(rows) * static_cast<double>(cols));
}

void GridSpec::validate() const {
  if (rows < 2 || cols < 2)
    throw Error("GridSpec: grid must have at least 2x2 bins, got " +
                std::to_string(rows) + "x" + std::to_string(cols));
  if (corner_rows < 1 || 2 * corner_rows > rows)
    throw Error("GridSpec: corner_rows must satisfy 1 <= m <= rows/2, got m=" +
                std::to_string(corner_rows) + " rows=" + std::to_string(rows));
  if (corner_cols < 1 || 2 * corner_cols > cols)
    throw Error("GridSpec: corner_cols must satisfy 1 <= n <= cols/2, got n=" +
                std::to_string(corner_cols) + " cols=" + std::to_string(cols));
  const double lo = min_area_lower_bound();
  if (min_area_frac < lo || min_area_frac >= 1.0)
    throw Error("GridSpec: min_area_frac must lie in [" + std::to_string(lo) +
                ", 1), got " + std::to_string(min_area_frac));
  if (!(aspect_min > 0.0) || aspect_min > aspect_max)
    throw Error("GridSpec: aspect bounds must satisfy 0 < aspect_min <= aspect_max");
}

void validate_dims_for_grid(const ImageDims& dims, const GridSpec& spec) {
  spec.validate();
  if (dims.height < spec.rows || dims.width < spec.cols)
    throw Error("image " + std::to_string(dims.height) + "x" +
                std::to_string(dims.width) + " is smaller than the " +
                std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
                " anchor grid");
}

AnchorCenters anchor_centers(const ImageDims& dims, const GridSpec& spec) {
  validate_dims_for_grid(dims, spec);
  AnchorCenters out;
  out.rows.reserve(spec.rows);
  out.cols.reserve(spec.cols);
  for (int k = 0; k < spec.rows; ++k)
    out.rows.push_back((k + 0.5) * dims.height / spec.rows);
  for (int k = 0; k < spec.cols; ++k)
    out.cols.push_back((k + 0.5) * dims.width / spec.cols);
  return out;
}

int anchor_pixel(int bin_index, int bins, int image_extent) {
  return static_cast<int>(
      std::llround((bin_index + 0.5) * image_extent / bins));
}

std::vector<CropRect> enumerate_candidates(const ImageDims& dims,
                                           const GridSpec& spec) {
  validate_dims_for_grid(dims, spec);

  std::vector<int> top_rows(spec.corner_rows), bottom_rows(spec.corner_rows);
  std::vector<int> left_cols(spec.corner_cols), right_cols(spec.corner_cols);
  for (int i = 0; i < spec.corner_rows; ++i) {
    top_rows[i] = anchor_pixel(i, spec.rows, dims.height);
    bottom_rows[i] =
        anchor_pixel(spec.rows - spec.corner_rows + i, spec.rows, dims.height);
  }
  for (int j = 0; j < spec.corner_cols; ++j) {
    left_cols[j] = anchor_pixel(j, spec.cols, dims.width);
    right_cols[j] =
        anchor_pixel(spec.cols - spec.corner_cols + j, spec.cols, dims.width);
  }

  // Shrinking the threshold by a few ulps keeps crops whose exact area
  // equals min_area_frac * S from being dropped to double rounding.
  const double min_area = spec.min_area_frac *
                          static_cast<double>(dims.area()) *
                          (1.0 - 8.0 * std::numeric_limits<double>::epsilon());
  std::vector<CropRect> out;
  out.reserve(static_cast<size_t>(spec.corner_rows) * spec.corner_cols *
              spec.corner_rows * spec.corner_cols);
  for (int i = 0; i < spec.corner_rows; ++i) {
    for (int j = 0; j < spec.corner_cols; ++j) {
      for (int i2 = 0; i2 < spec.corner_rows; ++i2) {
        for (int j2 = 0; j2 < spec.corner_cols; ++j2) {
          CropRect c{top_rows[i], left_cols[j], bottom_rows[i2],
                     right_cols[j2]};
          if (c.height() <= 0 || c.width() <= 0) continue;
          if (static_cast<double>(crop_area(c)) < min_area) continue;
          const double ratio = aspect_ratio(c);
          if (ratio < spec.aspect_min || ratio > spec.aspect_max) continue;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

void validate_crop(const CropRect& c, const ImageDims& dims) {
  if (!(0 <= c.x1 && c.x1 < c.x2 && c.x2 <= dims.height && 0 <= c.y1 &&
        c.y1 < c.y2 && c.y2 <= dims.width))
    throw Error("crop (" + std::to_string(c.x1) + "," + std::to_string(c.y1) +
                "," + std::to_string(c.x2) + "," + std::to_string(c.y2) +
                ") is invalid for a " + std::to_string(dims.height) + "x" +
                std::to_string(dims.width) + " image");
}

int64_t crop_area(const CropRect& c) {
  return static_cast<int64_t>(c.height()) * static_cast<int64_t>(c.width());
}

double aspect_ratio(const CropRect& c) {
  return static_cast<double>(c.width()) / static_cast<double>(c.height());
}

double iou(const CropRect& a, const CropRect& b) {
  const int ix1 = std::max(a.x1, b.x1);
  const int iy1 = std::max(a.y1, b.y1);
  const int ix2 = std::min(a.x2, b.x2);
  const int iy2 = std::min(a.y2, b.y2);
  const int64_t ih = std::max(0, ix2 - ix1);
  const int64_t iw = std::max(0, iy2 - iy1);
  const int64_t inter = ih * iw;
  const int64_t uni = crop_area(a) + crop_area(b) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double bde(const CropRect& a, const CropRect& b, const ImageDims& dims) {
  const double h = dims.height;
  const double w = dims.width;
  return (std::abs(a.x1 - b.x1) / h + std::abs(a.x2 - b.x2) / h +
          std::abs(a.y1 - b.y1) / w + std::abs(a.y2 - b.y2) / w) /
         4.0;
}

BaselineMode parse_baseline_mode(const std::string& name) {
  if (name == "N" || name == "n") return BaselineMode::no_crop;
  if (name == "C" || name == "c") return BaselineMode::central;
  if (name == "L" || name == "l") return BaselineMode::largest_candidate;
  throw Error("unknown baseline mode '" + name + "' (expected N, C or L)");
}

CropRect baseline_crop(const ImageDims& dims, BaselineMode mode,
                       const GridSpec& spec) {
  switch (mode) {
    case BaselineMode::no_crop:
      return CropRect{0, 0, dims.height, dims.width};
    case BaselineMode::central: {
      const int x1 = static_cast<int>(std::floor(0.05 * dims.height));
      const int y1 = static_cast<int>(std::floor(0.05 * dims.width));
      const int hh = static_cast<int>(std::llround(0.9 * dims.height));
      const int ww = static_cast<int>(std::llround(0.9 * dims.width));
      return CropRect{x1, y1, x1 + hh, y1 + ww};
    }
    case BaselineMode::largest_candidate: {
      const auto candidates = enumerate_candidates(dims, spec);
      if (candidates.empty())
        throw Error("baseline L: candidate set is empty for " +
                    std::to_string(dims.height) + "x" +
                    std::to_string(dims.width));
      const CropRect* best = &candidates.front();
      for (const auto& c : candidates)
        if (crop_area(c) > crop_area(*best)) best = &c;
      return *best;
    }
  }
  throw Error("baseline_crop: unreachable mode");
}

std::string format_crop_list(const std::vector<CropRect>& crops) {
  std::ostringstream os;
  for (const auto& c : crops)
    os << c.x1 << ' ' << c.y1 << ' ' << c.x2 << ' ' << c.y2 << '\n';
  return os.str();
}

std::vector<CropRect> parse_crop_list(const std::string& text) {
  std::vector<CropRect> out;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    CropRect c;
    if (!(ls >> c.x1 >> c.y1 >> c.x2 >> c.y2))
      throw Error("crop list line " + std::to_string(line_no) +
                  ": expected 'x1 y1 x2 y2', got '" + line + "'");
    out.push_back(c);
  }
  return out;
}

}  // namespace gaic

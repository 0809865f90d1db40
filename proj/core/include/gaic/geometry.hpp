#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaic/error.hpp"

namespace gaic {

// Axis-aligned crop window in pixel coordinates. x indexes rows (top edge
// inclusive, bottom edge exclusive), y indexes columns likewise.
struct CropRect {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  int height() const { return x2 - x1; }
  int width() const { return y2 - y1; }

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

struct ImageDims {
  int height = 0;
  int width = 0;

  int64_t area() const {
    return static_cast<int64_t>(height) * static_cast<int64_t>(width);
  }

  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

// Grid-anchor enumeration parameters: the image is partitioned into
// rows x cols bins; crop corners live on bin centers inside the two
// corner_rows x corner_cols regions at the top-left and bottom-right.
// Candidates must keep at least min_area_frac of the image area and an
// aspect ratio (width/height) inside [aspect_min, aspect_max].
struct GridSpec {
  int rows = 12;
  int cols = 12;
  int corner_rows = 4;
  int corner_cols = 4;
  double min_area_frac = 0.5;
  double aspect_min = 0.5;
  double aspect_max = 2.0;

  // Smallest admissible min_area_frac: the area fraction of the smallest
  // rectangle the corner regions can produce.
  double min_area_lower_bound() const;
  // Throws Error when any structural invariant fails.
  void validate() const;
};

void validate_dims_for_grid(const ImageDims& dims, const GridSpec& spec);

// Bin-center coordinates along each axis: rows[k] = (k + 0.5) * H / rows.
struct AnchorCenters {
  std::vector<double> rows;
  std::vector<double> cols;
};
AnchorCenters anchor_centers(const ImageDims& dims, const GridSpec& spec);

// Nearest-pixel coordinate of a bin center (halves round away from zero).
int anchor_pixel(int bin_index, int bins, int image_extent);

// All crops whose corners sit on corner-region anchor centers and that pass
// the area and aspect filters, in row-major order over the top-left anchor,
// then row-major over the bottom-right anchor. The filters are evaluated on
// the rounded integer rectangle. An empty result is legal.
std::vector<CropRect> enumerate_candidates(const ImageDims& dims,
                                           const GridSpec& spec);

void validate_crop(const CropRect& c, const ImageDims& dims);

int64_t crop_area(const CropRect& c);
double aspect_ratio(const CropRect& c);

// Intersection over union, in [0, 1].
double iou(const CropRect& a, const CropRect& b);

// Mean displacement of the four edges, each normalized by the matching
// image extent. Symmetric, zero iff the rectangles coincide.
double bde(const CropRect& a, const CropRect& b, const ImageDims& dims);

enum class BaselineMode {
  no_crop,            // the full image
  central,            // centered window at 0.9 of each extent
  largest_candidate,  // max-area enumerated candidate
};

BaselineMode parse_baseline_mode(const std::string& name);

CropRect baseline_crop(const ImageDims& dims, BaselineMode mode,
                       const GridSpec& spec);

// Plain-text crop list: one "x1 y1 x2 y2" line per crop.
std::string format_crop_list(const std::vector<CropRect>& crops);
std::vector<CropRect> parse_crop_list(const std::string& text);

}  // namespace gaic

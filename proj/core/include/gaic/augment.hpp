#pragma once

#include <span>
#include <vector>

#include "gaic/image.hpp"
#include "gaic/rng.hpp"

namespace gaic {

struct CropMos {
  CropRect rect;
  double mos = 0.0;

  friend bool operator==(const CropMos&, const CropMos&) = default;
};

// Photometric jitter ranges (multiplicative factors except hue, which is a
// rotation in turns) and the horizontal-flip probability. Zero-width ranges
// with flip_prob 0 make augmentation the identity.
struct AugmentRanges {
  double brightness_min = 0.8, brightness_max = 1.2;
  double contrast_min = 0.8, contrast_max = 1.2;
  double saturation_min = 0.8, saturation_max = 1.2;
  double hue_min = -0.05, hue_max = 0.05;
  double flip_prob = 0.5;
};

struct AugmentedSample {
  RawImage image;
  std::vector<CropMos> crops;
};

// Composition-preserving augmentation: photometric jitter never touches the
// crop rectangles or their scores; a horizontal flip mirrors the image and
// maps each crop (x1,y1,x2,y2) -> (x1, W-y2, x2, W-y1) with scores
// unchanged. No rotation, no vertical flip.
AugmentedSample augment(const RawImage& img, std::span<const CropMos> crops,
                        Rng& rng, const AugmentRanges& ranges = {});

}  // namespace gaic

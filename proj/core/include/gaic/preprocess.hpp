#pragma once

#include <array>

#include "gaic/image.hpp"
#include "gaic/tensor.hpp"

namespace gaic {

// Per-channel normalization constants applied after scaling RGB to [0,1].
// Defaults are the canonical published ImageNet statistics; overridable via
// configuration.
struct ChannelNorm {
  std::array<double, 3> mean{0.485, 0.456, 0.406};
  std::array<double, 3> stddev{0.229, 0.224, 0.225};
};

// A model-ready image: bilinearly resized so the short side matches the
// target, scaled to [0,1] and channel-normalized. Crop coordinates defined
// on the source image map into tensor coordinates with the same scale
// factors.
struct PreprocessedImage {
  nn::TensorPtr tensor;  // {1, 3, h, w}
  ImageDims source;      // original extents
  ImageDims scaled;      // tensor spatial extents

  CropRect map_crop(const CropRect& crop) const;
};

PreprocessedImage preprocess(const RawImage& img, int short_side = 256,
                             const ChannelNorm& norm = {});

}  // namespace gaic

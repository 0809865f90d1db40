#pragma once

#include <span>

#include "gaic/geometry.hpp"
#include "gaic/tensor.hpp"

namespace gaic::nn {

// Differentiable kernels. Every op computes its forward result immediately;
// when `tape` is non-null and gradients are needed, a backward step is
// recorded on it. Passing tape == nullptr runs inference-only.

// Cross-correlation of input {N,C,H,W} with weights {O,C,KH,KW}; zero
// padding. Output spatial extent is floor((in + 2*pad - k)/stride) + 1.
TensorPtr conv2d(Tape* tape, const TensorPtr& input, const TensorPtr& weights,
                 int stride = 1, int padding = 0);

TensorPtr relu(Tape* tape, const TensorPtr& x);

// Per-sample, per-channel normalization over the spatial extent followed by
// a learned affine map: y = gamma * (x - mean) / sqrt(var + 1e-8) + shift.
// A channel whose spatial variance is below 1e-12 (or with a single spatial
// element) raises an error rather than emitting unstable values.
TensorPtr channel_norm(Tape* tape, const TensorPtr& x, const TensorPtr& gamma,
                       const TensorPtr& shift);

// Concatenation along the channel axis; batch and spatial extents must match.
TensorPtr channel_concat(Tape* tape, std::span<const TensorPtr> parts);

// Concatenation along the batch axis; all other extents must match.
TensorPtr batch_concat(Tape* tape, std::span<const TensorPtr> parts);

// Bilinear resampling with half-pixel centers: output pixel i samples the
// input at (i + 0.5) * in/out - 0.5, clamped at the borders. Exact on
// inputs linear in each coordinate (away from clamped samples) and an exact
// copy when the extents are unchanged.
TensorPtr bilinear_resize(Tape* tape, const TensorPtr& x, int out_h,
                          int out_w);

// Resamples the crop's footprint on the feature map to an out_size x
// out_size grid, one bilinear sample per bin center. Pixel coordinates map
// to feature coordinates by division with feature_stride. The feature map
// must be a single-batch {1,C,Hf,Wf} tensor.
TensorPtr roi_align(Tape* tape, const TensorPtr& fmap, const CropRect& crop,
                    const ImageDims& image_dims, int out_size,
                    int feature_stride = 16);

// Complement view: zeroes every feature cell whose center falls inside the
// crop's mapped rectangle, then resamples the full map extent to out_size x
// out_size with the same bilinear convention. Gradient into the zeroed
// region is exactly zero.
TensorPtr rod_align(Tape* tape, const TensorPtr& fmap, const CropRect& crop,
                    const ImageDims& image_dims, int out_size,
                    int feature_stride = 16);

// y = x * W for x {N,D} and W {D,O}.
TensorPtr fully_connected(Tape* tape, const TensorPtr& x,
                          const TensorPtr& weights);

// Reshapes {N, ...} to {N, D}, keeping the batch axis.
TensorPtr flatten_rows(Tape* tape, const TensorPtr& x);

// Mean Huber loss over all elements with residual e = target - pred:
// 0.5*e^2 for |e| <= delta, else delta*|e| - 0.5*delta^2. Scalar output.
TensorPtr huber_loss(Tape* tape, const TensorPtr& pred,
                     const TensorPtr& target, double delta = 1.0);

// Elementwise product (same shapes).
TensorPtr mul(Tape* tape, const TensorPtr& a, const TensorPtr& b);

// Sum of all elements; scalar output.
TensorPtr sum(Tape* tape, const TensorPtr& x);

}  // namespace gaic::nn

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gaic/tensor.hpp"

namespace gaic::nn {

// ADAM with bias correction. Moment buffers are allocated on first use and
// stay bound to the parameter list's order and shapes.
struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
  std::vector<std::vector<double>> m;  // first moments, one per parameter
  std::vector<std::vector<double>> v;  // second moments
};

// One update over all parameters. Every parameter must carry a gradient
// buffer; a zero gradient with fresh state leaves the parameter unchanged.
void adam_step(std::span<const TensorPtr> params, AdamState& state);

}  // namespace gaic::nn

#pragma once

#include <functional>
#include <span>

#include "gaic/tensor.hpp"

namespace gaic::nn {

// Compares reverse-mode gradients against central finite differences for a
// scalar-valued forward function. `forward` must rebuild its graph from the
// current values of the `wrt` tensors on every call. Returns the maximum
// relative error max(|analytic - numeric| / max(1, |analytic|, |numeric|))
// over all elements of all `wrt` tensors.
double finite_difference_check(const std::function<TensorPtr(Tape&)>& forward,
                               std::span<const TensorPtr> wrt, double epsilon);

}  // namespace gaic::nn

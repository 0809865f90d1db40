#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "gaic/error.hpp"

namespace gaic::nn {

// Dense N-dimensional array of doubles with an optional same-shape gradient
// buffer. Image tensors use (batch, channel, height, width) order.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until a backward pass touches it
  bool requires_grad = false;

  int64_t size() const {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
  }
  int ndim() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  // Allocates the gradient buffer (zero-filled) if absent.
  void ensure_grad();
  // Resets the gradient buffer to zeros (allocating if needed).
  void zero_grad();
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(std::vector<int> shape, bool requires_grad = false);
TensorPtr full(std::vector<int> shape, double fill_value);
TensorPtr from_values(std::vector<int> shape, std::vector<double> values);
TensorPtr scalar(double v);

// Ordered record of executed operations. Each op pushes one backward step;
// backward() replays them exactly once in reverse execution order.
class Tape {
 public:
  void record(std::function<void()> step) { steps_.push_back(std::move(step)); }

  // Seeds d(root)/d(root) = 1 (root must be scalar) and propagates.
  void backward(const TensorPtr& root);

  size_t steps() const { return steps_.size(); }
  void clear() { steps_.clear(); }

 private:
  std::vector<std::function<void()>> steps_;
};

}  // namespace gaic::nn

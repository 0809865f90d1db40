#include "gaic/tensor.hpp"

#include <algorithm>

namespace gaic::nn {

void Tensor::ensure_grad() {
  if (grad.empty()) grad.assign(static_cast<size_t>(size()), 0.0);
}

void Tensor::zero_grad() {
  grad.assign(static_cast<size_t>(size()), 0.0);
}

TensorPtr make_tensor(std::vector<int> shape, bool requires_grad) {
  for (int d : shape)
    if (d <= 0) throw Error("tensor extents must be positive");
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->value.assign(static_cast<size_t>(t->size()), 0.0);
  t->requires_grad = requires_grad;
  return t;
}

TensorPtr full(std::vector<int> shape, double fill_value) {
  auto t = make_tensor(std::move(shape));
  std::fill(t->value.begin(), t->value.end(), fill_value);
  return t;
}

TensorPtr from_values(std::vector<int> shape, std::vector<double> values) {
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  int64_t n = 1;
  for (int d : t->shape) {
    if (d <= 0) throw Error("tensor extents must be positive");
    n *= d;
  }
  if (n != static_cast<int64_t>(values.size()))
    throw Error("tensor data length " + std::to_string(values.size()) +
                " does not match shape product " + std::to_string(n));
  t->value = std::move(values);
  return t;
}

TensorPtr scalar(double v) { return from_values({1}, {v}); }

void Tape::backward(const TensorPtr& root) {
  if (!root) throw Error("backward: null root");
  if (root->size() != 1)
    throw Error("backward: root must be scalar, has " +
                std::to_string(root->size()) + " elements");
  root->ensure_grad();
  root->grad[0] = 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

}  // namespace gaic::nn

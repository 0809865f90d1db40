#include "gaic/optim.hpp"

#include <cmath>

namespace gaic::nn {

void adam_step(std::span<const TensorPtr> params, AdamState& state) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i]->value.size(), 0.0);
      state.v[i].assign(params[i]->value.size(), 0.0);
    }
  }
  if (state.m.size() != params.size())
    throw Error("adam_step: parameter count changed between steps");
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i]->grad.size() != params[i]->value.size())
      throw Error("adam_step: parameter " + std::to_string(i) +
                  " has no gradient");
    if (state.m[i].size() != params[i]->value.size())
      throw Error("adam_step: parameter " + std::to_string(i) +
                  " changed shape between steps");
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i]->value;
    const auto& g = params[i]->grad;
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (size_t j = 0; j < p.size(); ++j) {
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g[j];
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g[j] * g[j];
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p[j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace gaic::nn

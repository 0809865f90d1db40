#include "gaic/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gaic::nn {

double finite_difference_check(const std::function<TensorPtr(Tape&)>& forward,
                               std::span<const TensorPtr> wrt,
                               double epsilon) {
  if (!(epsilon > 0.0)) throw Error("finite_difference_check: epsilon <= 0");

  for (const auto& t : wrt) t->zero_grad();
  Tape tape;
  auto root = forward(tape);
  tape.backward(root);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(wrt.size());
  for (const auto& t : wrt) {
    t->ensure_grad();
    analytic.push_back(t->grad);
  }

  const auto eval = [&forward]() {
    Tape scratch;
    auto out = forward(scratch);
    return out->value[0];
  };

  double max_rel = 0.0;
  for (size_t ti = 0; ti < wrt.size(); ++ti) {
    auto& vals = wrt[ti]->value;
    for (size_t i = 0; i < vals.size(); ++i) {
      const double saved = vals[i];
      vals[i] = saved + epsilon;
      const double f_plus = eval();
      vals[i] = saved - epsilon;
      const double f_minus = eval();
      vals[i] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
      const double a = analytic[ti][i];
      const double rel = std::abs(a - numeric) /
                         std::max({1.0, std::abs(a), std::abs(numeric)});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace gaic::nn

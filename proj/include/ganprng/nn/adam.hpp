#pragma once

#include <cmath>
#include <cstdint>

#include "ganprng/errors.hpp"
#include "ganprng/tensor.hpp"

namespace ganprng::nn {

/// Per-parameter Adam accumulators. step_count increases by exactly one per
/// update, which the training loops rely on for schedule bookkeeping.
struct AdamState {
  Tensor first_moment;
  Tensor second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(const std::vector<std::size_t>& shape)
      : first_moment(shape), second_moment(shape) {}
};

/// Standard Adam update with bias correction, in place. Returns the updated
/// parameter tensor.
inline Tensor& adam_step(Tensor& param, const Tensor& grad, AdamState& state,
                         double lr) {
  if (!param.same_shape(grad) || !param.same_shape(state.first_moment)) {
    throw InvalidInput("adam_step: parameter, gradient and state shapes disagree");
  }
  ++state.step_count;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
  double* p = param.data();
  const double* g = grad.data();
  double* m = state.first_moment.data();
  double* v = state.second_moment.data();
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    const double m_hat = m[i] / corr1;
    const double v_hat = v[i] / corr2;
    p[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
  return param;
}

}  // namespace ganprng::nn

#pragma once

#include <cmath>

#include "ganprng/errors.hpp"
#include "ganprng/tensor.hpp"

namespace ganprng::nn {

struct LossResult {
  double value;
  Tensor grad;  // d(loss)/d(pred), same shape as pred
};

/// Mean squared error over the batch: mean((pred - target)^2).
/// Gradient is 2(pred - target)/batch.
inline LossResult least_squares_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) {
    throw InvalidInput("least_squares_loss: shape mismatch");
  }
  const std::size_t n = pred.size();
  LossResult r{0.0, Tensor(pred.shape())};
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred[i] - target[i];
    r.value += d * d;
    r.grad[i] = 2.0 * d / static_cast<double>(n);
  }
  r.value /= static_cast<double>(n);
  return r;
}

/// Mean absolute error over the batch: mean(|pred - target|).
/// Subgradient at zero is defined as 0.
inline LossResult absolute_difference_loss(const Tensor& pred,
                                           const Tensor& target) {
  if (!pred.same_shape(target)) {
    throw InvalidInput("absolute_difference_loss: shape mismatch");
  }
  const std::size_t n = pred.size();
  LossResult r{0.0, Tensor(pred.shape())};
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred[i] - target[i];
    r.value += std::abs(d);
    r.grad[i] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / static_cast<double>(n);
  }
  r.value /= static_cast<double>(n);
  return r;
}

}  // namespace ganprng::nn

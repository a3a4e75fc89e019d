#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ganprng/errors.hpp"
#include "ganprng/nn/adam.hpp"
#include "ganprng/rng.hpp"
#include "ganprng/tensor.hpp"

namespace ganprng::nn {

/// View over one learnable tensor plus its gradient and Adam accumulators.
struct ParamRef {
  Tensor& value;
  Tensor& grad;
  AdamState& adam;
};

namespace detail {

/// Xavier-uniform initialization: weights in +/- sqrt(6/(fan_in+fan_out)),
/// drawn from the run's seeded RNG so construction is reproducible.
inline void xavier_fill(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                        Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
}

}  // namespace detail

/// Fully connected layer: y = W·x + b over a [batch x in] input.
/// forward caches its input; backward accumulates parameter gradients and
/// returns the input gradient.
class DenseLayer {
 public:
  DenseLayer(std::size_t in_dim, std::size_t out_dim, Rng& rng)
      : in_(in_dim),
        out_(out_dim),
        weights_({out_dim, in_dim}),
        bias_({out_dim}),
        weight_grad_({out_dim, in_dim}),
        bias_grad_({out_dim}),
        weight_adam_({out_dim, in_dim}),
        bias_adam_({out_dim}) {
    detail::xavier_fill(weights_, in_, out_, rng);
  }

  std::size_t in_dim() const noexcept { return in_; }
  std::size_t out_dim() const noexcept { return out_; }
  std::size_t parameter_count() const noexcept { return out_ * in_ + out_; }

  Tensor forward(const Tensor& x) {
    if (x.rank() != 2 || x.dim(1) != in_) {
      throw InvalidInput("dense forward: expected [batch x " +
                         std::to_string(in_) + "] input");
    }
    const std::size_t batch = x.dim(0);
    Tensor y({batch, out_});
    const double* xp = x.data();
    const double* wp = weights_.data();
    const double* bp = bias_.data();
    double* yp = y.data();
    for (std::size_t b = 0; b < batch; ++b) {
      const double* xrow = xp + b * in_;
      double* yrow = yp + b * out_;
      for (std::size_t o = 0; o < out_; ++o) {
        const double* wrow = wp + o * in_;
        double acc = bp[o];
        for (std::size_t i = 0; i < in_; ++i) acc += wrow[i] * xrow[i];
        yrow[o] = acc;
      }
    }
    input_cache_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& grad_out) {
    if (!has_cache_) throw StateError("dense backward before forward");
    const Tensor& x = input_cache_;
    const std::size_t batch = x.dim(0);
    if (grad_out.rank() != 2 || grad_out.dim(0) != batch ||
        grad_out.dim(1) != out_) {
      throw InvalidInput("dense backward: gradient shape mismatch");
    }
    Tensor grad_in({batch, in_});
    const double* xp = x.data();
    const double* gp = grad_out.data();
    const double* wp = weights_.data();
    double* gwp = weight_grad_.data();
    double* gbp = bias_grad_.data();
    double* gip = grad_in.data();
    for (std::size_t b = 0; b < batch; ++b) {
      const double* xrow = xp + b * in_;
      const double* grow = gp + b * out_;
      double* girow = gip + b * in_;
      for (std::size_t o = 0; o < out_; ++o) {
        const double g = grow[o];
        gbp[o] += g;
        double* gwrow = gwp + o * in_;
        const double* wrow = wp + o * in_;
        for (std::size_t i = 0; i < in_; ++i) {
          gwrow[i] += g * xrow[i];
          girow[i] += g * wrow[i];
        }
      }
    }
    return grad_in;
  }

  template <class F>
  void for_each_parameter(F&& f) {
    f(ParamRef{weights_, weight_grad_, weight_adam_});
    f(ParamRef{bias_, bias_grad_, bias_adam_});
  }

  Tensor& weights() noexcept { return weights_; }
  const Tensor& weights() const noexcept { return weights_; }
  Tensor& bias() noexcept { return bias_; }
  const Tensor& bias() const noexcept { return bias_; }
  const Tensor& weight_grad() const noexcept { return weight_grad_; }
  const Tensor& bias_grad() const noexcept { return bias_grad_; }

 private:
  std::size_t in_;
  std::size_t out_;
  Tensor weights_, bias_;
  Tensor weight_grad_, bias_grad_;
  AdamState weight_adam_, bias_adam_;
  Tensor input_cache_;
  bool has_cache_ = false;
};

/// Valid (no padding) 1-D cross-correlation:
///   out[f][i] = sum_c sum_k filters[f][c][k] * x[c][i*stride + k] + bias[f]
/// over a [batch x channels x length] input.
class Conv1DLayer {
 public:
  Conv1DLayer(std::size_t in_channels, std::size_t num_filters,
              std::size_t kernel, std::size_t stride, Rng& rng)
      : in_channels_(in_channels),
        num_filters_(num_filters),
        kernel_(kernel),
        stride_(stride),
        filters_({num_filters, in_channels, kernel}),
        bias_({num_filters}),
        filter_grad_({num_filters, in_channels, kernel}),
        bias_grad_({num_filters}),
        filter_adam_({num_filters, in_channels, kernel}),
        bias_adam_({num_filters}) {
    if (kernel == 0 || stride == 0) {
      throw InvalidInput("conv1d: kernel and stride must be positive");
    }
    detail::xavier_fill(filters_, in_channels * kernel, num_filters * kernel,
                        rng);
  }

  static std::size_t output_length(std::size_t input_length,
                                   std::size_t kernel, std::size_t stride) {
    if (input_length < kernel) {
      throw InvalidInput("conv1d: input shorter than kernel");
    }
    return (input_length - kernel) / stride + 1;
  }

  std::size_t parameter_count() const noexcept {
    return num_filters_ * in_channels_ * kernel_ + num_filters_;
  }

  Tensor forward(const Tensor& x) {
    if (x.rank() != 3 || x.dim(1) != in_channels_) {
      throw InvalidInput("conv1d forward: expected [batch x " +
                         std::to_string(in_channels_) + " x length] input");
    }
    const std::size_t batch = x.dim(0);
    const std::size_t len = x.dim(2);
    const std::size_t out_len = output_length(len, kernel_, stride_);
    Tensor y({batch, num_filters_, out_len});
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t f = 0; f < num_filters_; ++f) {
        for (std::size_t i = 0; i < out_len; ++i) {
          double acc = bias_[f];
          for (std::size_t c = 0; c < in_channels_; ++c) {
            for (std::size_t k = 0; k < kernel_; ++k) {
              acc += filters_.at(f, c, k) * x.at(b, c, i * stride_ + k);
            }
          }
          y.at(b, f, i) = acc;
        }
      }
    }
    input_cache_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& grad_out) {
    if (!has_cache_) throw StateError("conv1d backward before forward");
    const Tensor& x = input_cache_;
    const std::size_t batch = x.dim(0);
    const std::size_t len = x.dim(2);
    const std::size_t out_len = output_length(len, kernel_, stride_);
    if (grad_out.rank() != 3 || grad_out.dim(0) != batch ||
        grad_out.dim(1) != num_filters_ || grad_out.dim(2) != out_len) {
      throw InvalidInput("conv1d backward: gradient shape mismatch");
    }
    Tensor grad_in({batch, in_channels_, len});
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t f = 0; f < num_filters_; ++f) {
        for (std::size_t i = 0; i < out_len; ++i) {
          const double g = grad_out.at(b, f, i);
          bias_grad_[f] += g;
          for (std::size_t c = 0; c < in_channels_; ++c) {
            for (std::size_t k = 0; k < kernel_; ++k) {
              filter_grad_.at(f, c, k) += g * x.at(b, c, i * stride_ + k);
              grad_in.at(b, c, i * stride_ + k) += g * filters_.at(f, c, k);
            }
          }
        }
      }
    }
    return grad_in;
  }

  template <class F>
  void for_each_parameter(F&& f) {
    f(ParamRef{filters_, filter_grad_, filter_adam_});
    f(ParamRef{bias_, bias_grad_, bias_adam_});
  }

  Tensor& filters() noexcept { return filters_; }
  Tensor& bias() noexcept { return bias_; }
  std::size_t kernel() const noexcept { return kernel_; }
  std::size_t stride() const noexcept { return stride_; }

 private:
  std::size_t in_channels_;
  std::size_t num_filters_;
  std::size_t kernel_;
  std::size_t stride_;
  Tensor filters_, bias_;
  Tensor filter_grad_, bias_grad_;
  AdamState filter_adam_, bias_adam_;
  Tensor input_cache_;
  bool has_cache_ = false;
};

/// Per-channel max pooling over a [batch x channels x length] input.
/// Trailing partial windows are discarded. Argmax positions are cached;
/// backward routes each gradient only to its window's argmax (first
/// maximum wins on ties).
class MaxPool1D {
 public:
  MaxPool1D(std::size_t pool, std::size_t stride)
      : pool_(pool), stride_(stride) {
    if (pool == 0 || stride == 0) {
      throw InvalidInput("maxpool1d: pool and stride must be positive");
    }
  }

  std::size_t output_length(std::size_t input_length) const {
    if (input_length < pool_) {
      throw InvalidInput("maxpool1d: pool window larger than input");
    }
    return (input_length - pool_) / stride_ + 1;
  }

  Tensor forward(const Tensor& x) {
    if (x.rank() != 3) {
      throw InvalidInput("maxpool1d forward: expected rank-3 input");
    }
    const std::size_t batch = x.dim(0);
    const std::size_t channels = x.dim(1);
    const std::size_t len = x.dim(2);
    const std::size_t out_len = output_length(len);
    Tensor y({batch, channels, out_len});
    argmax_.assign(batch * channels * out_len, 0);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t i = 0; i < out_len; ++i) {
          std::size_t best = i * stride_;
          double best_v = x.at(b, c, best);
          for (std::size_t k = 1; k < pool_; ++k) {
            const double v = x.at(b, c, i * stride_ + k);
            if (v > best_v) {
              best_v = v;
              best = i * stride_ + k;
            }
          }
          y.at(b, c, i) = best_v;
          argmax_[(b * channels + c) * out_len + i] = best;
        }
      }
    }
    input_shape_ = x.shape();
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& grad_out) {
    if (!has_cache_) throw StateError("maxpool1d backward before forward");
    const std::size_t batch = input_shape_[0];
    const std::size_t channels = input_shape_[1];
    const std::size_t out_len = grad_out.dim(2);
    Tensor grad_in(input_shape_);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t i = 0; i < out_len; ++i) {
          grad_in.at(b, c, argmax_[(b * channels + c) * out_len + i]) +=
              grad_out.at(b, c, i);
        }
      }
    }
    return grad_in;
  }

  std::size_t pool() const noexcept { return pool_; }
  std::size_t stride() const noexcept { return stride_; }

 private:
  std::size_t pool_;
  std::size_t stride_;
  std::vector<std::size_t> argmax_;
  std::vector<std::size_t> input_shape_;
  bool has_cache_ = false;
};

/// Elementwise max(x, slope*x) with slope in (0, 1).
class LeakyRelu {
 public:
  explicit LeakyRelu(double slope = 0.2) : slope_(slope) {
    if (!(slope > 0.0 && slope < 1.0)) {
      throw InvalidInput("leaky relu slope must be in (0, 1)");
    }
  }

  Tensor forward(const Tensor& x) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] < 0.0) y[i] *= slope_;
    }
    input_cache_ = x;
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& grad_out) {
    if (!has_cache_) throw StateError("leaky relu backward before forward");
    if (!grad_out.same_shape(input_cache_)) {
      throw InvalidInput("leaky relu backward: gradient shape mismatch");
    }
    Tensor grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.size(); ++i) {
      if (input_cache_[i] < 0.0) grad_in[i] *= slope_;
    }
    return grad_in;
  }

  double slope() const noexcept { return slope_; }

 private:
  double slope_;
  Tensor input_cache_;
  bool has_cache_ = false;
};

/// Elementwise y = x mod m with the floored-division convention, so the
/// output always lands in [0, m). The derivative is 1 almost everywhere;
/// backward passes gradients through unchanged, which is what lets the
/// generator train through its output layer.
class ModActivation {
 public:
  explicit ModActivation(double modulus) : modulus_(modulus) {
    if (!(modulus > 0.0)) throw InvalidInput("mod activation: modulus must be positive");
  }

  static double apply(double x, double m) {
    double y = std::fmod(x, m);
    if (y < 0.0) y += m;
    if (y >= m) y = 0.0;  // rounding at the wrap point
    return y;
  }

  Tensor forward(const Tensor& x) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = apply(y[i], modulus_);
    return y;
  }

  Tensor backward(const Tensor& grad_out) const { return grad_out; }

  double modulus() const noexcept { return modulus_; }

 private:
  double modulus_;
};

/// Elementwise logistic squashing 1/(1 + e^-x).
class Sigmoid {
 public:
  Tensor forward(const Tensor& x) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = 1.0 / (1.0 + std::exp(-y[i]));
    }
    output_cache_ = y;
    has_cache_ = true;
    return y;
  }

  Tensor backward(const Tensor& grad_out) {
    if (!has_cache_) throw StateError("sigmoid backward before forward");
    Tensor grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.size(); ++i) {
      const double y = output_cache_[i];
      grad_in[i] *= y * (1.0 - y);
    }
    return grad_in;
  }

 private:
  Tensor output_cache_;
  bool has_cache_ = false;
};

}  // namespace ganprng::nn

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ganprng/errors.hpp"
#include "ganprng/nn/layers.hpp"
#include "ganprng/rng.hpp"
#include "ganprng/tensor.hpp"

namespace ganprng {

/// Batch of eight-value generator output rows, raw scale [0, 65536).
class SequenceBatch {
 public:
  static constexpr std::size_t kRowWidth = 8;

  explicit SequenceBatch(Tensor values) : values_(std::move(values)) {
    if (values_.rank() != 2 || values_.dim(1) != kRowWidth) {
      throw InvalidInput("sequence batch rows must have width 8");
    }
  }

  std::size_t rows() const noexcept { return values_.dim(0); }
  const Tensor& values() const noexcept { return values_; }
  Tensor& values() noexcept { return values_; }

 private:
  Tensor values_;
};

struct SplitSequences {
  Tensor inputs;  // [batch x 7], the first seven values of each row
  Tensor labels;  // [batch], the eighth value
};

/// Splits each row into the predictor's input (first 7 values) and its
/// label (the 8th value).
inline SplitSequences split_sequences(const SequenceBatch& batch) {
  const std::size_t n = batch.rows();
  SplitSequences out{Tensor({n, 7}), Tensor({n})};
  const Tensor& v = batch.values();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < 7; ++c) out.inputs.at(r, c) = v.at(r, c);
    out.labels[r] = v.at(r, 7);
  }
  return out;
}

namespace nn {

/// CRTP mixin supplying the optimizer plumbing shared by all networks.
/// Derived classes expose for_each_parameter(f) over ParamRef views.
template <class Derived>
class Trainable {
 public:
  void zero_grad() {
    self().for_each_parameter([](ParamRef p) { p.grad.fill(0.0); });
  }

  void apply_adam(double lr) {
    self().for_each_parameter(
        [lr](ParamRef p) { adam_step(p.value, p.grad, p.adam, lr); });
  }

  /// Number of optimizer updates applied so far (all parameters move in
  /// lockstep, so the first parameter's count is the network's).
  std::uint64_t update_count() {
    std::uint64_t n = 0;
    bool first = true;
    self().for_each_parameter([&](ParamRef p) {
      if (first) {
        n = p.adam.step_count;
        first = false;
      }
    });
    return n;
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    self().for_each_parameter([&](ParamRef p) { n += p.value.size(); });
    return n;
  }

 private:
  Derived& self() { return static_cast<Derived&>(*this); }
};

}  // namespace nn

/// Feed-forward generator: (seed, offset) -> 8 values in [0, 65536).
///
/// Raw 16-bit-range inputs are scaled by 1/2^16 before the first layer;
/// the output layer applies mod 2^16, so every output lands in the word
/// range regardless of the pre-activation magnitude.
class GeneratorNet : public nn::Trainable<GeneratorNet> {
 public:
  static constexpr double kModulus = 65536.0;
  static constexpr double kInputScale = 1.0 / 65536.0;
  static constexpr std::size_t kInputDim = 2;
  static constexpr std::size_t kOutputDim = SequenceBatch::kRowWidth;

  explicit GeneratorNet(Rng& rng, std::size_t hidden_width = 30,
                        std::size_t hidden_depth = 4)
      : hidden_width_(hidden_width),
        hidden_depth_(hidden_depth),
        mod_(kModulus) {
    if (hidden_width == 0 || hidden_depth == 0) {
      throw InvalidInput("generator: hidden width and depth must be positive");
    }
    std::size_t in = kInputDim;
    for (std::size_t i = 0; i < hidden_depth; ++i) {
      hidden_.emplace_back(in, hidden_width, rng);
      activations_.emplace_back(0.2);
      in = hidden_width;
    }
    output_ = std::make_unique<nn::DenseLayer>(in, kOutputDim, rng);
  }

  std::size_t hidden_width() const noexcept { return hidden_width_; }
  std::size_t hidden_depth() const noexcept { return hidden_depth_; }

  SequenceBatch forward(const Tensor& inputs) {
    if (inputs.rank() != 2 || inputs.dim(1) != kInputDim) {
      throw InvalidInput("generator forward: expected [batch x 2] input");
    }
    Tensor h = inputs;
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= kInputScale;
    for (std::size_t i = 0; i < hidden_.size(); ++i) {
      h = activations_[i].forward(hidden_[i].forward(h));
    }
    return SequenceBatch(mod_.forward(output_->forward(h)));
  }

  /// Accumulates parameter gradients from a gradient w.r.t. the raw
  /// [batch x 8] outputs.
  void backward(const Tensor& grad_outputs) {
    Tensor g = output_->backward(mod_.backward(grad_outputs));
    for (std::size_t i = hidden_.size(); i-- > 0;) {
      g = hidden_[i].backward(activations_[i].backward(g));
    }
  }

  template <class F>
  void for_each_parameter(F&& f) {
    for (auto& l : hidden_) l.for_each_parameter(f);
    output_->for_each_parameter(f);
  }

 private:
  std::size_t hidden_width_;
  std::size_t hidden_depth_;
  std::vector<nn::DenseLayer> hidden_;
  std::vector<nn::LeakyRelu> activations_;
  std::unique_ptr<nn::DenseLayer> output_;
  nn::ModActivation mod_;
};

namespace detail {

/// Shared convolutional trunk of the discriminator and predictor: four
/// stacked Conv1D layers (4 filters, kernel 2, stride 1) with leaky ReLU,
/// max pooling (2, 2), then two dense layers. The input is a flat sequence,
/// treated as one channel.
class ConvAdversary {
 public:
  ConvAdversary(std::size_t input_length, Rng& rng)
      : input_length_(input_length), pool_(2, 2) {
    std::size_t channels = 1;
    std::size_t length = input_length;
    for (int i = 0; i < 4; ++i) {
      convs_.emplace_back(channels, 4, 2, 1, rng);
      conv_acts_.emplace_back(0.2);
      channels = 4;
      length = nn::Conv1DLayer::output_length(length, 2, 1);
    }
    conv_out_length_ = length;
    flattened_ = 4 * pool_.output_length(length);
    fc1_ = std::make_unique<nn::DenseLayer>(flattened_, 4, rng);
    fc2_ = std::make_unique<nn::DenseLayer>(4, 1, rng);
  }

  /// Sequence length after the conv stack, before pooling.
  std::size_t conv_stack_output_length() const noexcept {
    return conv_out_length_;
  }

  /// Raw [batch x input_length] rows -> [batch] linear scores.
  /// Inputs are scaled by 1/2^16 internally.
  Tensor forward(const Tensor& rows) {
    if (rows.rank() != 2 || rows.dim(1) != input_length_) {
      throw InvalidInput("adversary forward: expected [batch x " +
                         std::to_string(input_length_) + "] input");
    }
    const std::size_t batch = rows.dim(0);
    Tensor h = rows.reshaped({batch, 1, input_length_});
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= GeneratorNet::kInputScale;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      h = conv_acts_[i].forward(convs_[i].forward(h));
    }
    h = pool_.forward(h);
    h = h.reshaped({batch, flattened_});
    h = fc_act_.forward(fc1_->forward(h));
    h = fc2_->forward(h);
    return h.reshaped({batch});
  }

  /// Gradient w.r.t. the linear scores -> gradient w.r.t. the raw inputs.
  Tensor backward(const Tensor& grad_scores) {
    const std::size_t batch = grad_scores.dim(0);
    Tensor g = grad_scores.reshaped({batch, std::size_t{1}});
    g = fc1_->backward(fc_act_.backward(fc2_->backward(g)));
    g = pool_.backward(g.reshaped({batch, 4, flattened_ / 4}));
    for (std::size_t i = convs_.size(); i-- > 0;) {
      g = convs_[i].backward(conv_acts_[i].backward(g));
    }
    g = g.reshaped({batch, input_length_});
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= GeneratorNet::kInputScale;
    return g;
  }

  template <class F>
  void for_each_parameter(F&& f) {
    for (auto& c : convs_) c.for_each_parameter(f);
    fc1_->for_each_parameter(f);
    fc2_->for_each_parameter(f);
  }

 private:
  std::size_t input_length_;
  std::size_t conv_out_length_ = 0;
  std::size_t flattened_ = 0;
  std::vector<nn::Conv1DLayer> convs_;
  std::vector<nn::LeakyRelu> conv_acts_;
  nn::MaxPool1D pool_;
  std::unique_ptr<nn::DenseLayer> fc1_;
  std::unique_ptr<nn::DenseLayer> fc2_;
  nn::LeakyRelu fc_act_{0.2};
};

}  // namespace detail

/// Convolutional discriminator: an 8-value sequence -> p(reference) in [0, 1].
class DiscriminatorNet : public nn::Trainable<DiscriminatorNet> {
 public:
  static constexpr std::size_t kInputLength = 8;

  explicit DiscriminatorNet(Rng& rng) : trunk_(kInputLength, rng) {}

  /// One probability per row.
  Tensor forward(const SequenceBatch& batch) {
    return sigmoid_.forward(trunk_.forward(batch.values()));
  }

  /// Gradient w.r.t. probabilities -> gradient w.r.t. raw row values.
  Tensor backward(const Tensor& grad_probs) {
    return trunk_.backward(sigmoid_.backward(grad_probs));
  }

  std::size_t conv_stack_output_length() const noexcept {
    return trunk_.conv_stack_output_length();
  }

  template <class F>
  void for_each_parameter(F&& f) {
    trunk_.for_each_parameter(f);
  }

 private:
  detail::ConvAdversary trunk_;
  nn::Sigmoid sigmoid_;
};

/// Convolutional predictor: the first 7 values of a sequence -> a scalar
/// prediction of the 8th, in normalized [0, 1) value space.
class PredictorNet : public nn::Trainable<PredictorNet> {
 public:
  static constexpr std::size_t kInputLength = 7;

  explicit PredictorNet(Rng& rng) : trunk_(kInputLength, rng) {}

  /// Raw [batch x 7] inputs -> [batch] normalized-space predictions.
  Tensor forward(const Tensor& split_inputs) {
    return trunk_.forward(split_inputs);
  }

  /// Gradient w.r.t. predictions -> gradient w.r.t. raw inputs.
  Tensor backward(const Tensor& grad_predictions) {
    return trunk_.backward(grad_predictions);
  }

  std::size_t conv_stack_output_length() const noexcept {
    return trunk_.conv_stack_output_length();
  }

  template <class F>
  void for_each_parameter(F&& f) {
    trunk_.for_each_parameter(f);
  }

 private:
  detail::ConvAdversary trunk_;
};

}  // namespace ganprng

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ganprng/checkpoint.hpp"
#include "ganprng/errors.hpp"
#include "ganprng/models.hpp"
#include "ganprng/nn/losses.hpp"
#include "ganprng/rng.hpp"

namespace ganprng {

enum class TrainMode { discriminative, predictive };

enum class ReferenceSourceKind { os_entropy, seeded_internal };

/// Every schedule hyperparameter of an adversarial run. The paper's
/// "epoch" is one mini-batch update round; it is named "step" here.
struct TrainConfig {
  TrainMode mode = TrainMode::predictive;
  std::uint64_t steps = 10'000;
  std::size_t batch_size = 256;
  double learning_rate = 0.02;
  std::uint32_t adversary_updates_per_gen_update = 3;
  std::uint64_t rng_seed = 1;
  ReferenceSourceKind reference_source = ReferenceSourceKind::seeded_internal;
  std::uint64_t checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::string checkpoint_prefix;       // required when checkpoint_every > 0

  void validate() const {
    if (steps == 0) throw InvalidInput("train config: steps must be positive");
    if (batch_size == 0) throw InvalidInput("train config: batch size must be positive");
    if (!(learning_rate > 0.0)) {
      throw InvalidInput("train config: learning rate must be positive");
    }
    if (adversary_updates_per_gen_update == 0) {
      throw InvalidInput("train config: adversary update ratio must be positive");
    }
    if (checkpoint_every > 0 && checkpoint_prefix.empty()) {
      throw InvalidInput("train config: checkpointing enabled without a prefix");
    }
  }
};

struct StepRecord {
  std::uint64_t step;  // 1-based generator step
  double generator_loss;
  double adversary_loss;
};

/// Per-step loss telemetry; exactly one record per generator step.
struct TrainLog {
  std::vector<StepRecord> records;

  void write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EnvironmentError("cannot open " + path.string() + " for writing");
    out << "step,generator_loss,adversary_loss\n";
    char line[128];
    for (const auto& r : records) {
      std::snprintf(line, sizeof(line), "%llu,%.17g,%.17g\n",
                    static_cast<unsigned long long>(r.step), r.generator_loss,
                    r.adversary_loss);
      out << line;
    }
    if (!out) throw EnvironmentError("write failed for " + path.string());
  }
};

/// Evaluation inputs [seed, 0], [seed, 1], ... [seed, count-1].
/// Rows are a pure function of (seed, offset), so the dataset is stored
/// as its two defining values and materialized in chunks.
struct EvalDataset {
  std::uint16_t seed = 0;
  std::uint64_t count = 0;

  /// Materializes rows [first, first + n) as a [n x 2] tensor.
  Tensor rows(std::uint64_t first, std::size_t n) const {
    if (first + n > count) throw InvalidInput("eval dataset: row range out of bounds");
    Tensor out({n, 2});
    for (std::size_t i = 0; i < n; ++i) {
      out.at(i, 0) = static_cast<double>(seed);
      out.at(i, 1) = static_cast<double>(first + i);
    }
    return out;
  }
};

inline EvalDataset build_eval_dataset(std::uint16_t seed, std::uint64_t count) {
  if (count == 0) throw InvalidInput("eval dataset: count must be positive");
  return EvalDataset{seed, count};
}

/// Fresh batch of (seed, offset) training inputs, drawn uniformly from
/// [0, 2^16)^2 by the run's seeded RNG.
inline Tensor sample_training_inputs(std::size_t rows, Rng& rng) {
  Tensor out({rows, 2});
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(rng.next_word16());
  }
  return out;
}

inline Tensor sample_training_inputs(const TrainConfig& cfg, Rng& rng) {
  return sample_training_inputs(cfg.batch_size, rng);
}

/// Source of reference randomness for the discriminative scheme. The
/// seeded-internal flavor replays identically for a given seed; the
/// os-entropy flavor draws from std::random_device.
class ReferenceSource {
 public:
  ReferenceSource(ReferenceSourceKind kind, std::uint64_t seed)
      : kind_(kind), rng_(seed) {
    if (kind_ == ReferenceSourceKind::os_entropy) {
      try {
        device_.emplace();
      } catch (const std::exception& e) {
        throw EnvironmentError(std::string("os entropy source unavailable: ") +
                               e.what());
      }
    }
  }

  /// [rows x 8] values uniform on [0, 65536).
  SequenceBatch next_batch(std::size_t rows) {
    Tensor values({rows, SequenceBatch::kRowWidth});
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = next_value();
    }
    return SequenceBatch(std::move(values));
  }

 private:
  double next_value() {
    if (kind_ == ReferenceSourceKind::seeded_internal) {
      return rng_.next_real01() * 65536.0;
    }
    try {
      return static_cast<double>((*device_)()) * (65536.0 / 4294967296.0);
    } catch (const std::exception& e) {
      throw EnvironmentError(std::string("os entropy source failed: ") + e.what());
    }
  }

  ReferenceSourceKind kind_;
  Rng rng_;
  std::optional<std::random_device> device_;
};

namespace detail {

inline void check_finite_loss(double loss, std::uint64_t step,
                              const std::function<void()>& dump) {
  if (!std::isfinite(loss)) {
    if (dump) dump();
    throw TrainingDiverged("non-finite loss", step);
  }
}

template <class Adversary>
void periodic_checkpoint(const TrainConfig& cfg, std::uint64_t step,
                         GeneratorNet& gen, Adversary& adv) {
  if (cfg.checkpoint_every == 0 || step % cfg.checkpoint_every != 0) return;
  const std::string tag = cfg.checkpoint_prefix + "-" + std::to_string(step);
  save_checkpoint(gen, tag + "-generator.ckpt");
  save_checkpoint(adv, tag + "-adversary.ckpt");
}

template <class Adversary>
void divergence_dump(const TrainConfig& cfg, GeneratorNet& gen, Adversary& adv) {
  if (cfg.checkpoint_prefix.empty()) return;
  save_checkpoint(gen, cfg.checkpoint_prefix + "-diverged-generator.ckpt");
  save_checkpoint(adv, cfg.checkpoint_prefix + "-diverged-adversary.ckpt");
}

}  // namespace detail

/// Discriminative scheme: per generator step the discriminator takes
/// `adversary_updates_per_gen_update` Adam updates on least-squares loss
/// over half-generated / half-reference batches (generated -> 0,
/// reference -> 1), then the generator takes one update pushing
/// D(G(inputs)) toward 1 with the discriminator's parameters frozen.
inline TrainLog train_discriminative(GeneratorNet& gen, DiscriminatorNet& disc,
                                     const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.mode != TrainMode::discriminative) {
    throw InvalidInput("train_discriminative: config mode mismatch");
  }
  if (cfg.batch_size < 2) {
    throw InvalidInput("train_discriminative: batch must hold both classes");
  }
  Rng rng(derive_seed(cfg.rng_seed, 2));
  ReferenceSource reference(cfg.reference_source, derive_seed(cfg.rng_seed, 3));
  const auto dump = [&] { detail::divergence_dump(cfg, gen, disc); };

  TrainLog log;
  log.records.reserve(cfg.steps);
  const std::size_t half = cfg.batch_size / 2;
  for (std::uint64_t step = 1; step <= cfg.steps; ++step) {
    double adversary_loss = 0.0;
    for (std::uint32_t u = 0; u < cfg.adversary_updates_per_gen_update; ++u) {
      const SequenceBatch generated =
          gen.forward(sample_training_inputs(half, rng));
      const SequenceBatch reference_batch =
          reference.next_batch(cfg.batch_size - half);
      Tensor combined({cfg.batch_size, SequenceBatch::kRowWidth});
      Tensor targets({cfg.batch_size});
      for (std::size_t r = 0; r < half; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
          combined.at(r, c) = generated.values().at(r, c);
        }
        targets[r] = 0.0;
      }
      for (std::size_t r = half; r < cfg.batch_size; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
          combined.at(r, c) = reference_batch.values().at(r - half, c);
        }
        targets[r] = 1.0;
      }
      const Tensor probs = disc.forward(SequenceBatch(std::move(combined)));
      const nn::LossResult loss = nn::least_squares_loss(probs, targets);
      detail::check_finite_loss(loss.value, step, dump);
      disc.zero_grad();
      disc.backward(loss.grad);
      disc.apply_adam(cfg.learning_rate);
      adversary_loss = loss.value;
    }

    // Generator update: fresh batch, discriminator frozen (its gradients
    // are computed as a side effect and discarded).
    const SequenceBatch generated = gen.forward(sample_training_inputs(cfg, rng));
    const Tensor probs = disc.forward(generated);
    Tensor ones({cfg.batch_size});
    ones.fill(1.0);
    const nn::LossResult loss = nn::least_squares_loss(probs, ones);
    detail::check_finite_loss(loss.value, step, dump);
    disc.zero_grad();
    const Tensor grad_rows = disc.backward(loss.grad);
    gen.zero_grad();
    gen.backward(grad_rows);
    gen.apply_adam(cfg.learning_rate);

    log.records.push_back({step, loss.value, adversary_loss});
    detail::periodic_checkpoint(cfg, step, gen, disc);
  }
  return log;
}

/// Predictive scheme: per generator step the predictor takes ratio updates
/// minimizing |P(r_1..7) - r_8| in normalized value space, then the
/// generator takes one update on the exact negation of that loss with the
/// predictor frozen. Gradients reach the generator through both the
/// predictor's inputs and the label.
inline TrainLog train_predictive(GeneratorNet& gen, PredictorNet& pred,
                                 const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.mode != TrainMode::predictive) {
    throw InvalidInput("train_predictive: config mode mismatch");
  }
  Rng rng(derive_seed(cfg.rng_seed, 2));
  const auto dump = [&] { detail::divergence_dump(cfg, gen, pred); };
  constexpr double scale = GeneratorNet::kInputScale;

  TrainLog log;
  log.records.reserve(cfg.steps);
  for (std::uint64_t step = 1; step <= cfg.steps; ++step) {
    for (std::uint32_t u = 0; u < cfg.adversary_updates_per_gen_update; ++u) {
      const SequenceBatch seq = gen.forward(sample_training_inputs(cfg, rng));
      SplitSequences split = split_sequences(seq);
      const Tensor predictions = pred.forward(split.inputs);
      for (std::size_t i = 0; i < split.labels.size(); ++i) {
        split.labels[i] *= scale;
      }
      const nn::LossResult loss =
          nn::absolute_difference_loss(predictions, split.labels);
      detail::check_finite_loss(loss.value, step, dump);
      pred.zero_grad();
      pred.backward(loss.grad);
      pred.apply_adam(cfg.learning_rate);
    }

    // Generator update: adversary frozen, loss is the exact negation of
    // the predictor's, evaluated on a fresh batch.
    const SequenceBatch seq = gen.forward(sample_training_inputs(cfg, rng));
    SplitSequences split = split_sequences(seq);
    const Tensor predictions = pred.forward(split.inputs);
    Tensor labels_norm = split.labels;
    for (std::size_t i = 0; i < labels_norm.size(); ++i) labels_norm[i] *= scale;
    const nn::LossResult loss =
        nn::absolute_difference_loss(predictions, labels_norm);
    detail::check_finite_loss(loss.value, step, dump);

    Tensor grad_predictions = loss.grad;  // d(+loss)/d(pred)
    for (std::size_t i = 0; i < grad_predictions.size(); ++i) {
      grad_predictions[i] = -grad_predictions[i];  // generator maximizes
    }
    pred.zero_grad();
    const Tensor grad_inputs = pred.backward(grad_predictions);  // [batch x 7] raw

    // Assemble the [batch x 8] gradient w.r.t. the raw generator outputs:
    // columns 0..6 through the predictor, column 7 through the label.
    Tensor grad_rows({cfg.batch_size, SequenceBatch::kRowWidth});
    for (std::size_t r = 0; r < cfg.batch_size; ++r) {
      for (std::size_t c = 0; c < 7; ++c) {
        grad_rows.at(r, c) = grad_inputs.at(r, c);
      }
      // d(-|p - l*scale|)/d(l) = +sign(p - l*scale) / batch * scale
      grad_rows.at(r, 7) = loss.grad[r] * scale;
    }
    gen.zero_grad();
    gen.backward(grad_rows);
    gen.apply_adam(cfg.learning_rate);

    log.records.push_back({step, -loss.value, loss.value});
    detail::periodic_checkpoint(cfg, step, gen, pred);
  }
  return log;
}

/// Streams generator outputs for the dataset in row order, in chunks of at
/// most chunk_rows. Rows depend only on (seed, offset), never on chunking.
inline void emit_evaluation_stream(
    GeneratorNet& gen, const EvalDataset& dataset, std::size_t chunk_rows,
    const std::function<void(const SequenceBatch&)>& sink) {
  if (chunk_rows == 0) throw InvalidInput("emit_evaluation_stream: chunk_rows must be positive");
  std::uint64_t done = 0;
  while (done < dataset.count) {
    const std::size_t n = static_cast<std::size_t>(
        std::min<std::uint64_t>(chunk_rows, dataset.count - done));
    sink(gen.forward(dataset.rows(done, n)));
    done += n;
  }
}

/// Convenience form materializing the whole stream.
inline SequenceBatch emit_evaluation_stream(GeneratorNet& gen,
                                            const EvalDataset& dataset) {
  Tensor all({static_cast<std::size_t>(dataset.count), SequenceBatch::kRowWidth});
  std::size_t row = 0;
  emit_evaluation_stream(gen, dataset, 4096, [&](const SequenceBatch& chunk) {
    for (std::size_t r = 0; r < chunk.rows(); ++r) {
      for (std::size_t c = 0; c < SequenceBatch::kRowWidth; ++c) {
        all.at(row, c) = chunk.values().at(r, c);
      }
      ++row;
    }
  });
  return SequenceBatch(std::move(all));
}

}  // namespace ganprng

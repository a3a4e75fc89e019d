#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ganprng/bitstream.hpp"
#include "ganprng/nist/tests.hpp"
#include "ganprng/train.hpp"
#include "support/gradcheck.hpp"

using namespace ganprng;

namespace {

TrainConfig small_config(TrainMode mode) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.steps = 5;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.02;
  cfg.adversary_updates_per_gen_update = 3;
  cfg.rng_seed = 21;
  return cfg;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST(EvalDataset, WorkedExamples) {
  const EvalDataset d = build_eval_dataset(10, 3);
  const Tensor rows = d.rows(0, 3);
  EXPECT_DOUBLE_EQ(rows.at(0, 0), 10.0);
  EXPECT_DOUBLE_EQ(rows.at(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(rows.at(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(rows.at(2, 1), 2.0);

  const EvalDataset single = build_eval_dataset(777, 1);
  const Tensor one = single.rows(0, 1);
  EXPECT_DOUBLE_EQ(one.at(0, 0), 777.0);
  EXPECT_DOUBLE_EQ(one.at(0, 1), 0.0);

  const EvalDataset zero_seed = build_eval_dataset(0, 2);
  const Tensor two = zero_seed.rows(0, 2);
  EXPECT_DOUBLE_EQ(two.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(two.at(1, 1), 1.0);

  EXPECT_THROW(build_eval_dataset(1, 0), InvalidInput);
  EXPECT_THROW(d.rows(2, 2), InvalidInput);
}

TEST(SampleTrainingInputs, DeterministicAndInRange) {
  TrainConfig cfg = small_config(TrainMode::predictive);
  Rng a(5), b(5);
  const Tensor x1 = sample_training_inputs(cfg, a);
  const Tensor x2 = sample_training_inputs(cfg, b);
  for (std::size_t i = 0; i < x1.size(); ++i) {
    EXPECT_EQ(x1[i], x2[i]);
    EXPECT_GE(x1[i], 0.0);
    EXPECT_LT(x1[i], 65536.0);
  }
}

TEST(SampleTrainingInputs, EmpiricalMeanIsCentered) {
  TrainConfig cfg = small_config(TrainMode::predictive);
  cfg.batch_size = 500'000;  // one million drawn values
  Rng rng(99);
  const Tensor x = sample_training_inputs(cfg, rng);
  double mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mean += x[i];
  mean /= static_cast<double>(x.size());
  EXPECT_NEAR(mean, 32767.5, 100.0);
}

TEST(ReferenceSource, SeededReplayAndRange) {
  ReferenceSource a(ReferenceSourceKind::seeded_internal, 7);
  ReferenceSource b(ReferenceSourceKind::seeded_internal, 7);
  const SequenceBatch ba = a.next_batch(32);
  const SequenceBatch bb = b.next_batch(32);
  for (std::size_t i = 0; i < ba.values().size(); ++i) {
    EXPECT_EQ(ba.values()[i], bb.values()[i]);
    EXPECT_GE(ba.values()[i], 0.0);
    EXPECT_LT(ba.values()[i], 65536.0);
  }
}

TEST(ReferenceSource, OsEntropyDrawsInRange) {
  ReferenceSource src(ReferenceSourceKind::os_entropy, 0);
  const SequenceBatch batch = src.next_batch(16);
  for (std::size_t i = 0; i < batch.values().size(); ++i) {
    EXPECT_GE(batch.values()[i], 0.0);
    EXPECT_LT(batch.values()[i], 65536.0);
  }
}

TEST(ReferenceSource, EmittedBitsPassMonobit) {
  // 100 draws of one million bits each; at alpha = 0.01 at least 98
  // should pass for a healthy source.
  ReferenceSource src(ReferenceSourceKind::seeded_internal, 424242);
  constexpr std::size_t kRowsPerMillionBits = 7813;  // ceil(1e6 / 128)
  int passes = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const auto words = quantize(src.next_batch(kRowsPerMillionBits));
    const BitStream bits = to_bits(words);
    const auto r = nist::monobit(
        nist::BitView(bits.view().data(), 1'000'000), 0.01);
    if (r.pass) ++passes;
  }
  EXPECT_GE(passes, 98);
}

TEST(TrainPredictive, ScheduleBookkeeping) {
  Rng init(derive_seed(21, 0));
  GeneratorNet gen(init);
  Rng adv_init(derive_seed(21, 1));
  PredictorNet pred(adv_init);
  const TrainConfig cfg = small_config(TrainMode::predictive);
  const TrainLog log = train_predictive(gen, pred, cfg);

  EXPECT_EQ(log.records.size(), 5u);
  EXPECT_EQ(gen.update_count(), 5u);
  EXPECT_EQ(pred.update_count(), 15u);  // 3 per generator step
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    EXPECT_EQ(log.records[i].step, i + 1);
    // Generator loss is the exact negation of the predictor loss.
    EXPECT_DOUBLE_EQ(log.records[i].generator_loss,
                     -log.records[i].adversary_loss);
  }
}

TEST(TrainDiscriminative, ScheduleBookkeeping) {
  Rng init(derive_seed(33, 0));
  GeneratorNet gen(init);
  Rng adv_init(derive_seed(33, 1));
  DiscriminatorNet disc(adv_init);
  TrainConfig cfg = small_config(TrainMode::discriminative);
  cfg.rng_seed = 33;
  const TrainLog log = train_discriminative(gen, disc, cfg);

  EXPECT_EQ(log.records.size(), 5u);
  EXPECT_EQ(gen.update_count(), 5u);
  EXPECT_EQ(disc.update_count(), 15u);
}

TEST(TrainPredictive, DeterministicReplay) {
  const TrainConfig cfg = small_config(TrainMode::predictive);
  std::uint64_t checksum1, checksum2;
  TrainLog log1, log2;
  {
    Rng init(derive_seed(cfg.rng_seed, 0));
    GeneratorNet gen(init);
    Rng adv_init(derive_seed(cfg.rng_seed, 1));
    PredictorNet pred(adv_init);
    log1 = train_predictive(gen, pred, cfg);
    checksum1 = gradcheck::parameter_checksum(gen);
  }
  {
    Rng init(derive_seed(cfg.rng_seed, 0));
    GeneratorNet gen(init);
    Rng adv_init(derive_seed(cfg.rng_seed, 1));
    PredictorNet pred(adv_init);
    log2 = train_predictive(gen, pred, cfg);
    checksum2 = gradcheck::parameter_checksum(gen);
  }
  EXPECT_EQ(checksum1, checksum2);
  ASSERT_EQ(log1.records.size(), log2.records.size());
  for (std::size_t i = 0; i < log1.records.size(); ++i) {
    EXPECT_EQ(log1.records[i].generator_loss, log2.records[i].generator_loss);
    EXPECT_EQ(log1.records[i].adversary_loss, log2.records[i].adversary_loss);
  }
}

TEST(TrainPhases, FrozenPartyParametersDoNotMove) {
  // Mirrors one adversary update and one generator update of the
  // predictive loop, checksumming the frozen side around each phase.
  Rng init(1);
  GeneratorNet gen(init);
  PredictorNet pred(init);
  Rng rng(2);
  TrainConfig cfg = small_config(TrainMode::predictive);

  // Adversary update phase: generator parameters must not move.
  const auto gen_before = gradcheck::parameter_checksum(gen);
  {
    const SequenceBatch seq = gen.forward(sample_training_inputs(cfg, rng));
    SplitSequences split = split_sequences(seq);
    const Tensor predictions = pred.forward(split.inputs);
    for (std::size_t i = 0; i < split.labels.size(); ++i) {
      split.labels[i] *= GeneratorNet::kInputScale;
    }
    const auto loss = nn::absolute_difference_loss(predictions, split.labels);
    pred.zero_grad();
    pred.backward(loss.grad);
    pred.apply_adam(cfg.learning_rate);
  }
  EXPECT_EQ(gradcheck::parameter_checksum(gen), gen_before);

  // Generator update phase: predictor parameters must not move even
  // though gradients flow through its computation.
  const auto pred_before = gradcheck::parameter_checksum(pred);
  {
    const SequenceBatch seq = gen.forward(sample_training_inputs(cfg, rng));
    SplitSequences split = split_sequences(seq);
    const Tensor predictions = pred.forward(split.inputs);
    Tensor labels_norm = split.labels;
    for (std::size_t i = 0; i < labels_norm.size(); ++i) {
      labels_norm[i] *= GeneratorNet::kInputScale;
    }
    const auto loss = nn::absolute_difference_loss(predictions, labels_norm);
    Tensor grad_predictions = loss.grad;
    for (std::size_t i = 0; i < grad_predictions.size(); ++i) {
      grad_predictions[i] = -grad_predictions[i];
    }
    pred.zero_grad();
    const Tensor grad_inputs = pred.backward(grad_predictions);
    Tensor grad_rows({cfg.batch_size, 8});
    for (std::size_t r = 0; r < cfg.batch_size; ++r) {
      for (std::size_t c = 0; c < 7; ++c) grad_rows.at(r, c) = grad_inputs.at(r, c);
      grad_rows.at(r, 7) = loss.grad[r] * GeneratorNet::kInputScale;
    }
    gen.zero_grad();
    gen.backward(grad_rows);
    gen.apply_adam(cfg.learning_rate);
  }
  EXPECT_EQ(gradcheck::parameter_checksum(pred), pred_before);
}

TEST(Train, NanLossAbortsWithDiagnosticDump) {
  Rng init(3);
  GeneratorNet gen(init);
  PredictorNet pred(init);
  // Poison one generator parameter.
  bool first = true;
  gen.for_each_parameter([&](nn::ParamRef p) {
    if (first) {
      p.value[0] = std::numeric_limits<double>::quiet_NaN();
      first = false;
    }
  });
  TrainConfig cfg = small_config(TrainMode::predictive);
  cfg.checkpoint_prefix = (std::filesystem::temp_directory_path() /
                           "ganprng_diverge_test").string();
  EXPECT_THROW(train_predictive(gen, pred, cfg), TrainingDiverged);
  EXPECT_TRUE(std::filesystem::exists(cfg.checkpoint_prefix +
                                      "-diverged-generator.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(cfg.checkpoint_prefix +
                                      "-diverged-adversary.ckpt"));
  std::filesystem::remove(cfg.checkpoint_prefix + "-diverged-generator.ckpt");
  std::filesystem::remove(cfg.checkpoint_prefix + "-diverged-adversary.ckpt");
}

TEST(Train, ConfigValidation) {
  Rng init(4);
  GeneratorNet gen(init);
  PredictorNet pred(init);
  TrainConfig cfg = small_config(TrainMode::predictive);
  cfg.steps = 0;
  EXPECT_THROW(train_predictive(gen, pred, cfg), InvalidInput);
  cfg = small_config(TrainMode::discriminative);
  EXPECT_THROW(train_predictive(gen, pred, cfg), InvalidInput);
}

TEST(TrainLog, CsvFormat) {
  TrainLog log;
  log.records.push_back({1, -0.25, 0.25});
  log.records.push_back({2, -0.125, 0.125});
  const auto path = temp_file("ganprng_loss.csv");
  log.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "step,generator_loss,adversary_loss");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  EXPECT_EQ(rows, 2);
  std::filesystem::remove(path);
}

TEST(EmitEvaluationStream, SingleRowGivesEightValues) {
  Rng init(5);
  GeneratorNet gen(init);
  const SequenceBatch out = emit_evaluation_stream(gen, build_eval_dataset(10, 1));
  EXPECT_EQ(out.rows(), 1u);
  EXPECT_EQ(out.values().size(), 8u);
}

TEST(EmitEvaluationStream, ChunkingDoesNotChangeRows) {
  Rng init(6);
  GeneratorNet gen(init);
  const EvalDataset dataset = build_eval_dataset(10, 10);

  std::vector<double> chunked;
  emit_evaluation_stream(gen, dataset, 3, [&](const SequenceBatch& chunk) {
    for (std::size_t i = 0; i < chunk.values().size(); ++i) {
      chunked.push_back(chunk.values()[i]);
    }
  });
  const SequenceBatch whole = emit_evaluation_stream(gen, dataset);
  ASSERT_EQ(chunked.size(), whole.values().size());
  for (std::size_t i = 0; i < chunked.size(); ++i) {
    EXPECT_EQ(chunked[i], whole.values()[i]);
  }
}

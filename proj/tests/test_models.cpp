#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ganprng/checkpoint.hpp"
#include "ganprng/models.hpp"
#include "ganprng/rng.hpp"
#include "support/gradcheck.hpp"

using namespace ganprng;

namespace {

Tensor random_inputs(std::size_t rows, Rng& rng) {
  Tensor x({rows, 2});
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(rng.next_word16());
  }
  return x;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

double ModActivationClamp(double v) {
  return nn::ModActivation::apply(v, 65536.0);
}

}  // namespace

TEST(Generator, ParameterCountIsDocumented) {
  Rng rng(1);
  GeneratorNet gen(rng);
  // (2*30+30) + 3*(30*30+30) + (30*8+8)
  EXPECT_EQ(gen.parameter_count(), 3128u);
}

TEST(Generator, DeterministicForward) {
  Rng rng(2);
  GeneratorNet gen(rng);
  const Tensor x = random_inputs(5, rng);
  const SequenceBatch a = gen.forward(x);
  const SequenceBatch b = gen.forward(x);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    EXPECT_EQ(a.values()[i], b.values()[i]);
  }
}

TEST(Generator, ZeroWeightsYieldBiasModulo) {
  Rng rng(3);
  GeneratorNet gen(rng);
  gen.for_each_parameter([](nn::ParamRef p) { p.value.fill(0.0); });
  // Reach into the output layer bias: it is the last parameter tensor of
  // size 8 visited by for_each_parameter.
  Tensor* out_bias = nullptr;
  gen.for_each_parameter([&](nn::ParamRef p) {
    if (p.value.rank() == 1 && p.value.size() == 8) out_bias = &p.value;
  });
  ASSERT_NE(out_bias, nullptr);
  out_bias->fill(70000.0);
  const SequenceBatch out = gen.forward(random_inputs(3, rng));
  for (std::size_t i = 0; i < out.values().size(); ++i) {
    EXPECT_DOUBLE_EQ(out.values()[i], 70000.0 - 65536.0);
  }
}

TEST(Generator, BatchShapeContract) {
  Rng rng(4);
  GeneratorNet gen(rng);
  const SequenceBatch out = gen.forward(random_inputs(3, rng));
  EXPECT_EQ(out.rows(), 3u);
  EXPECT_EQ(out.values().dim(1), 8u);
}

TEST(Generator, OutputRangeInvariantHoldsOnManyInputs) {
  Rng rng(5);
  GeneratorNet gen(rng);
  constexpr std::size_t kTotal = 100'000;
  constexpr std::size_t kChunk = 4096;
  std::size_t done = 0;
  while (done < kTotal) {
    const std::size_t n = std::min(kChunk, kTotal - done);
    const SequenceBatch out = gen.forward(random_inputs(n, rng));
    for (std::size_t i = 0; i < out.values().size(); ++i) {
      ASSERT_GE(out.values()[i], 0.0);
      ASSERT_LT(out.values()[i], 65536.0);
    }
    done += n;
  }
}

TEST(Generator, RejectsWrongInputWidth) {
  Rng rng(6);
  GeneratorNet gen(rng);
  EXPECT_THROW(gen.forward(Tensor({2, 3})), InvalidInput);
}

TEST(Discriminator, AllZeroParametersGiveHalf) {
  Rng rng(7);
  DiscriminatorNet disc(rng);
  disc.for_each_parameter([](nn::ParamRef p) { p.value.fill(0.0); });
  Tensor rows({4, 8});
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = rng.uniform(0, 65536);
  const Tensor probs = disc.forward(SequenceBatch(rows));
  ASSERT_EQ(probs.size(), 4u);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    EXPECT_DOUBLE_EQ(probs[i], 0.5);
  }
}

TEST(Discriminator, OutputsBoundedInUnitInterval) {
  Rng rng(8);
  DiscriminatorNet disc(rng);
  Tensor rows({64, 8});
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = rng.uniform(0, 65536);
  const Tensor probs = disc.forward(SequenceBatch(rows));
  EXPECT_EQ(probs.size(), 64u);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    EXPECT_GE(probs[i], 0.0);
    EXPECT_LE(probs[i], 1.0);
  }
}

TEST(Discriminator, ConvStackLengthBeforePoolingIsFour) {
  Rng rng(9);
  DiscriminatorNet disc(rng);
  EXPECT_EQ(disc.conv_stack_output_length(), 4u);
}

TEST(Predictor, AllZeroParametersGiveZero) {
  Rng rng(10);
  PredictorNet pred(rng);
  pred.for_each_parameter([](nn::ParamRef p) { p.value.fill(0.0); });
  Tensor rows({3, 7});
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = rng.uniform(0, 65536);
  const Tensor out = pred.forward(rows);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_DOUBLE_EQ(out[i], 0.0);
}

TEST(Predictor, ConvStackLengthBeforePoolingIsThree) {
  Rng rng(11);
  PredictorNet pred(rng);
  EXPECT_EQ(pred.conv_stack_output_length(), 3u);
}

TEST(Predictor, PredictionRespondsToReachableInputElements) {
  // The conv stack maps 7 inputs to 3 positions and the (2, 2) max pool
  // keeps only the first window, so the pooled receptive field covers
  // inputs 0..5. Element 6 feeds the discarded trailing position only and
  // provably cannot move the prediction.
  Rng rng(12);
  PredictorNet pred(rng);
  Tensor row({1, 7});
  for (std::size_t i = 0; i < 7; ++i) row[i] = rng.uniform(0, 65536);
  const double base = pred.forward(row)[0];
  const double deltas[] = {5000.0, 30000.0, -30000.0};
  for (std::size_t i = 0; i < 6; ++i) {
    bool responded = false;
    for (double d : deltas) {
      Tensor perturbed = row;
      perturbed[i] = ModActivationClamp(perturbed[i] + d);
      if (pred.forward(perturbed)[0] != base) responded = true;
    }
    EXPECT_TRUE(responded) << "input element " << i << " had no effect";
  }
  for (double d : deltas) {
    Tensor perturbed = row;
    perturbed[6] = ModActivationClamp(perturbed[6] + d);
    EXPECT_EQ(pred.forward(perturbed)[0], base)
        << "element 6 is outside the pooled receptive field";
  }
}

TEST(Predictor, RejectsWrongWidth) {
  Rng rng(13);
  PredictorNet pred(rng);
  EXPECT_THROW(pred.forward(Tensor({1, 8})), InvalidInput);
}

TEST(SplitSequences, SplitsAndReassembles) {
  Tensor rows({2, 8}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
  const SequenceBatch batch(rows);
  const auto split = split_sequences(batch);
  EXPECT_EQ(split.inputs.dim(1), 7u);
  EXPECT_EQ(split.labels.size(), 2u);
  EXPECT_DOUBLE_EQ(split.inputs.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(split.inputs.at(0, 6), 7.0);
  EXPECT_DOUBLE_EQ(split.labels[0], 8.0);
  EXPECT_DOUBLE_EQ(split.labels[1], 16.0);
  // Reassembly reproduces the original rows.
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 7; ++c) {
      EXPECT_DOUBLE_EQ(split.inputs.at(r, c), rows.at(r, c));
    }
    EXPECT_DOUBLE_EQ(split.labels[r], rows.at(r, 7));
  }
}

TEST(SequenceBatch, RejectsWrongRowWidth) {
  EXPECT_THROW(SequenceBatch(Tensor({2, 7})), InvalidInput);
}

TEST(Checkpoint, GeneratorRoundTripIsExact) {
  Rng rng(14);
  GeneratorNet gen(rng);
  const auto path = temp_file("ganprng_gen_roundtrip.ckpt");
  save_checkpoint(gen, path);
  GeneratorNet loaded = load_generator(path);
  EXPECT_EQ(gradcheck::parameter_checksum(gen),
            gradcheck::parameter_checksum(loaded));
  // Identical forward behavior.
  Rng probe(15);
  const Tensor x = random_inputs(3, probe);
  const SequenceBatch a = gen.forward(x);
  const SequenceBatch b = loaded.forward(x);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    EXPECT_EQ(a.values()[i], b.values()[i]);
  }
  std::filesystem::remove(path);
}

TEST(Checkpoint, AdversaryRoundTrips) {
  Rng rng(16);
  DiscriminatorNet disc(rng);
  PredictorNet pred(rng);
  const auto dpath = temp_file("ganprng_disc_roundtrip.ckpt");
  const auto ppath = temp_file("ganprng_pred_roundtrip.ckpt");
  save_checkpoint(disc, dpath);
  save_checkpoint(pred, ppath);
  DiscriminatorNet dloaded = load_discriminator(dpath);
  PredictorNet ploaded = load_predictor(ppath);
  EXPECT_EQ(gradcheck::parameter_checksum(disc),
            gradcheck::parameter_checksum(dloaded));
  EXPECT_EQ(gradcheck::parameter_checksum(pred),
            gradcheck::parameter_checksum(ploaded));
  std::filesystem::remove(dpath);
  std::filesystem::remove(ppath);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const auto path = temp_file("ganprng_corrupt.ckpt");
  {
    std::ofstream out(path, std::ios::binary);
    out << "definitely not a checkpoint";
  }
  EXPECT_THROW(load_generator(path), ParseError);

  // Wrong architecture id: a predictor checkpoint loaded as a generator.
  Rng rng(17);
  PredictorNet pred(rng);
  save_checkpoint(pred, path);
  EXPECT_THROW(load_generator(path), ParseError);

  // Truncation.
  GeneratorNet gen(rng);
  save_checkpoint(gen, path);
  std::filesystem::resize_file(path, 100);
  EXPECT_THROW(load_generator(path), ParseError);

  std::filesystem::remove(path);
  EXPECT_THROW(load_generator(path), EnvironmentError);
}

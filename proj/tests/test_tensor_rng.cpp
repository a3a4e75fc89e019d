#include <gtest/gtest.h>

#include "ganprng/rng.hpp"
#include "ganprng/tensor.hpp"

using ganprng::InvalidInput;
using ganprng::Rng;
using ganprng::Tensor;

TEST(Tensor, ShapeAndDataAgree) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  t.at(1, 2) = 5.0;
  EXPECT_DOUBLE_EQ(t[5], 5.0);
}

TEST(Tensor, RejectsMismatchedData) {
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), InvalidInput);
  EXPECT_THROW(Tensor({0, 2}), InvalidInput);
}

TEST(Tensor, ReshapePreservesData) {
  Tensor t({2, 2}, {1, 2, 3, 4});
  Tensor r = t.reshaped({4});
  EXPECT_EQ(r.rank(), 1u);
  EXPECT_DOUBLE_EQ(r[3], 4.0);
  EXPECT_THROW(t.reshaped({3}), InvalidInput);
}

TEST(Tensor, AllFinite) {
  Tensor t({2}, {1.0, 2.0});
  EXPECT_TRUE(t.all_finite());
  t[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(t.all_finite());
}

TEST(Rng, SeededReplayIsIdentical) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
  }
}

TEST(Rng, Word16CoversRange) {
  Rng rng(7);
  bool low = false, high = false;
  for (int i = 0; i < 20000; ++i) {
    const auto w = rng.next_word16();
    if (w < 1024) low = true;
    if (w >= 64512) high = true;
  }
  EXPECT_TRUE(low);
  EXPECT_TRUE(high);
}

TEST(Rng, Real01InRange) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.next_real01();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Rng, DeriveSeedSeparatesStreams) {
  EXPECT_NE(ganprng::derive_seed(1, 0), ganprng::derive_seed(1, 1));
  EXPECT_NE(ganprng::derive_seed(1, 0), ganprng::derive_seed(2, 0));
  EXPECT_EQ(ganprng::derive_seed(9, 4), ganprng::derive_seed(9, 4));
}

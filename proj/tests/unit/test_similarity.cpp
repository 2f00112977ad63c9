// Copyright 2026 The advlm-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "advlm/error.hpp"
#include "advlm/pivotal.hpp"
#include "advlm/similarity.hpp"
#include "advlm/warp.hpp"
#include "test_util.hpp"

namespace advlm {
namespace {

AttentionMap random_map(Rng& rng, std::size_t h = 6, std::size_t w = 6) {
  return AttentionMap(testing::random_tensor({h, w}, rng, 0.0, 1.0));
}

TEST(Ssim, ConstantZeroVersusConstantOne) {
  const AttentionMap zeros(Tensor::zeros({4, 4}));
  const AttentionMap ones(Tensor::full({4, 4}, 1.0));
  EXPECT_NEAR(ssim(zeros, ones), kSsimC1 / (1.0 + kSsimC1), 1e-15);
}

TEST(Ssim, IdenticalMapsScoreOne) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto m = random_map(rng);
    EXPECT_NEAR(ssim(m, m), 1.0, 1e-12);
    EXPECT_NEAR(pcc(m, m), 1.0, 1e-12);
    EXPECT_NEAR(sim(m, m), 1.0, 1e-12);
  }
}

TEST(Pcc, AffineInvariance) {
  Rng rng(2);
  const auto a = testing::random_tensor({16}, rng);
  std::vector<double> up, down;
  for (double v : a.values()) {
    up.push_back(3.0 * v + 1.0);
    down.push_back(-0.5 * v + 2.0);
  }
  EXPECT_NEAR(pcc(a.values(), up), 1.0, 1e-12);
  EXPECT_NEAR(pcc(a.values(), down), -1.0, 1e-12);
}

TEST(Pcc, ConstantInputGivesZero) {
  const std::vector<double> flat(9, 0.3), ramp{0, 1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(pcc(flat, ramp), 0.0);
  EXPECT_TRUE(is_constant(flat));
  EXPECT_FALSE(is_constant(ramp));
}

TEST(Similarity, SizeMismatchThrows) {
  const std::vector<double> a{1, 2}, b{1, 2, 3};
  EXPECT_THROW(ssim(a, b), ShapeError);
  EXPECT_THROW(pcc(a, b), ShapeError);
}

TEST(MeanMap, Elementwise) {
  const std::vector<AttentionMap> maps{AttentionMap(Tensor::zeros({2, 2})),
                                       AttentionMap(Tensor::full({2, 2}, 1.0))};
  EXPECT_EQ(mean_map(maps).values().values(), (std::vector<double>(4, 0.5)));
}

TEST(Pivotal, StartsAtFirstFrameAndKOneReturnsIt) {
  Rng rng(3);
  std::vector<AttentionMap> maps;
  for (int i = 0; i < 5; ++i) maps.push_back(random_map(rng));
  const auto sel = select_pivotal(maps, 1);
  EXPECT_EQ(sel.picks, (std::vector<std::size_t>{0}));
  const auto all = select_pivotal(maps, 5);
  EXPECT_EQ(all.picks.front(), 0u);
  EXPECT_EQ(all.indices, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Pivotal, TiesGoToLowestIndex) {
  const AttentionMap a(Tensor({2, 2}, {1, 0, 0, 0}));
  const AttentionMap b(Tensor({2, 2}, {0, 1, 0, 0}));
  // Frames 1..3 are identical, so they tie at every step.
  const std::vector<AttentionMap> maps{a, b, b, b};
  EXPECT_EQ(select_pivotal(maps, 3).picks, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Pivotal, PicksLeastSimilarFrame) {
  const AttentionMap base(Tensor({2, 2}, {1, 0.5, 0.2, 0}));
  const AttentionMap close(Tensor({2, 2}, {0.9, 0.5, 0.2, 0}));
  const AttentionMap flipped(Tensor({2, 2}, {0, 0.2, 0.5, 1}));
  const std::vector<AttentionMap> maps{base, close, flipped};
  EXPECT_EQ(select_pivotal(maps, 2).picks, (std::vector<std::size_t>{0, 2}));
}

TEST(Pivotal, RejectsBadK) {
  Rng rng(4);
  std::vector<AttentionMap> maps{random_map(rng), random_map(rng)};
  EXPECT_THROW(select_pivotal(maps, 0), InvalidArgument);
  EXPECT_THROW(select_pivotal(maps, 3), InvalidArgument);
}

TEST(Pivotal, OracleAgreesOnRandomSequences) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(8);
    const std::size_t k = 1 + rng.uniform_int(static_cast<std::uint32_t>(std::min<std::size_t>(n, 4)));
    std::vector<AttentionMap> maps;
    for (std::size_t i = 0; i < n; ++i) maps.push_back(random_map(rng));
    const auto sel = select_pivotal(maps, k);
    const auto v = verify_pivotal(maps, sel.picks);
    EXPECT_TRUE(v.verified) << "trial " << trial;
  }
}

TEST(Pivotal, OracleFlagsAWrongPick) {
  const AttentionMap base(Tensor({2, 2}, {1, 0.5, 0.2, 0}));
  const AttentionMap close(Tensor({2, 2}, {0.9, 0.5, 0.2, 0}));
  const AttentionMap flipped(Tensor({2, 2}, {0, 0.2, 0.5, 1}));
  const std::vector<AttentionMap> maps{base, close, flipped};
  const std::vector<std::size_t> wrong{0, 1};
  const auto v = verify_pivotal(maps, wrong);
  EXPECT_FALSE(v.verified);
  ASSERT_TRUE(v.first_bad_step.has_value());
  EXPECT_EQ(v.steps.at(*v.first_bad_step).expected, 2u);
}

TEST(Pivotal, BruteForceCapsSequenceLength) {
  Rng rng(6);
  const ToyVlm model = testing::tiny_model(1);
  const auto ids = model.encode_text("turn left");
  const auto seq9 = testing::random_sequence(rng, kBruteForceMaxFrames + 1);
  EXPECT_THROW(brute_force_pivotal(seq9, 2, model, ids), InvalidArgument);
  const auto seq = testing::random_sequence(rng, 6);
  EXPECT_TRUE(brute_force_pivotal(seq, 4, model, ids).verified);
}

TEST(Warp, IdentityIsBitwiseNoOp) {
  Rng rng(7);
  const Frame f = testing::random_frame(rng);
  EXPECT_EQ(warp(f, AffineParams::identity()), f);
}

TEST(Warp, HalfTurnOnTwoByTwo) {
  const Frame f(Tensor({1, 2, 2}, {0.1, 0.2, 0.3, 0.4}));
  AffineParams p;
  p.rotation = std::numbers::pi;
  const Frame r = warp(f, p);
  const std::vector<double> expected{0.4, 0.3, 0.2, 0.1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.pixels()[i], expected[i], 1e-12);
}

TEST(Warp, OnePixelShiftOfRamp) {
  const std::size_t W = 8;
  Tensor t({1, 1, W});
  for (std::size_t x = 0; x < W; ++x) t[x] = static_cast<double>(x) / (W - 1);
  AffineParams p;
  p.tx = 1.0 / W;
  const Frame out = warp(Frame(t), p);
  EXPECT_NEAR(out.pixels()[0], t[0], 1e-12);  // replicated border
  for (std::size_t x = 1; x < W; ++x) EXPECT_NEAR(out.pixels()[x], t[x - 1], 1e-12);
}

TEST(Warp, OutputStaysInUnitRange) {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const Frame w = warp(testing::random_frame(rng), sample_affine(rng));
    for (double v : w.pixels().values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Warp, SampledParamsRespectRanges) {
  Rng rng(9);
  const AffineRanges r;
  for (int i = 0; i < 200; ++i) {
    const auto p = sample_affine(rng, r);
    EXPECT_LE(std::abs(p.rotation), r.max_rotation);
    EXPECT_LE(std::abs(p.tx), r.max_translation);
    EXPECT_LE(std::abs(p.ty), r.max_translation);
    EXPECT_GE(p.scale, r.min_scale);
    EXPECT_LE(p.scale, r.max_scale);
  }
  AffineRanges bad;
  bad.min_scale = 1.2;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

}  // namespace
}  // namespace advlm

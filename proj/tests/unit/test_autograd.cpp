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

#include "advlm/autograd.hpp"
#include "advlm/error.hpp"
#include "advlm/grad_check.hpp"
#include "test_util.hpp"

namespace advlm {
namespace {

using testing::random_tensor;

TEST(Conv2d, AllOnesPadOneStrideTwo) {
  Graph g;
  Var x = g.constant(Tensor::full({1, 4, 4}, 1.0));
  Var k = g.constant(Tensor::full({1, 1, 3, 3}, 1.0));
  Var b = g.constant(Tensor::zeros({1}));
  Var y = ops::conv2d(x, k, b, 2, 1);
  EXPECT_EQ(y.shape(), (Shape{1, 2, 2}));
  EXPECT_EQ(y.value().values(), (std::vector<double>{4, 6, 6, 9}));
}

TEST(LogSoftmax, ZerosGiveMinusLogK) {
  Graph g;
  Var y = ops::log_softmax(g.constant(Tensor::zeros({5})));
  for (double v : y.value().values()) EXPECT_NEAR(v, -std::log(5.0), 1e-15);
}

TEST(LogSoftmax, StableForLargeLogits) {
  Graph g;
  Var y = ops::log_softmax(g.constant(Tensor({3}, {1000.0, 0.0, -1000.0})));
  EXPECT_NEAR(y.value()[0], 0.0, 1e-12);
  EXPECT_TRUE(y.value().all_finite());
}

TEST(Graph, BackwardIsSingleShot) {
  Graph g;
  Var x = g.leaf(Tensor::full({2}, 1.0), true);
  Var y = ops::sum(ops::mul(x, x));
  g.backward(y);
  EXPECT_EQ(g.grad(x).values(), (std::vector<double>{2.0, 2.0}));
  EXPECT_THROW(g.backward(y), Error);
}

TEST(Graph, BackwardNeedsScalarRoot) {
  Graph g;
  Var x = g.leaf(Tensor::full({2}, 1.0), true);
  EXPECT_THROW(g.backward(ops::scale(x, 2.0)), ShapeError);
}

TEST(Graph, NonFiniteValuesRejected) {
  Graph g;
  Var x = g.constant(Tensor::full({1}, std::numeric_limits<double>::max()));
  EXPECT_THROW(ops::scale(x, 10.0), NumericError);
}

TEST(Graph, GradIsZeroWhereNothingFlows) {
  Graph g;
  Var x = g.leaf(Tensor::full({3}, 1.0), true);
  Var unused = g.leaf(Tensor::full({2}, 1.0), true);
  g.backward(ops::sum(x));
  EXPECT_EQ(g.grad(unused).values(), (std::vector<double>{0.0, 0.0}));
}

TEST(Ops, SignHasZeroGradient) {
  Graph g;
  Var x = g.leaf(Tensor({2}, {0.5, -0.3}), true);
  g.backward(ops::sum(ops::sign(x)));
  EXPECT_EQ(g.grad(x).values(), (std::vector<double>{0.0, 0.0}));
}

TEST(Ops, ClampPassesGradientInsideRange) {
  Graph g;
  Var x = g.leaf(Tensor({3}, {-2.0, 0.5, 2.0}), true);
  g.backward(ops::sum(ops::clamp(x, -1.0, 1.0)));
  EXPECT_EQ(g.grad(x).values(), (std::vector<double>{0.0, 1.0, 0.0}));
}

TEST(Ops, ShapeMismatchThrows) {
  Graph g;
  Var a = g.constant(Tensor::zeros({2}));
  Var b = g.constant(Tensor::zeros({3}));
  EXPECT_THROW(ops::add(a, b), ShapeError);
  EXPECT_THROW(ops::matmul(g.constant(Tensor::zeros({2, 3})), g.constant(Tensor::zeros({2, 3}))), ShapeError);
  EXPECT_THROW(ops::gather_rows(g.constant(Tensor::zeros({2, 3})), std::vector<int>{5}), InvalidArgument);
}

// Weighted sum against a fixed random tensor so every output coordinate
// carries a distinct gradient.
Var weighted(Graph& g, Var y, std::uint64_t seed) {
  Rng rng(seed, 99);
  return ops::sum(ops::mul(y, g.constant(random_tensor(y.shape(), rng))));
}

struct OpCase {
  const char* name;
  Shape input;
  ScalarFn fn;
};

std::vector<OpCase> op_cases(std::uint64_t seed) {
  Rng rng(seed, 3);
  const Tensor other = random_tensor({3, 4}, rng);
  const Tensor mat = random_tensor({4, 2}, rng);
  const Tensor kernel = random_tensor({2, 2, 3, 3}, rng);
  const Tensor bias = random_tensor({2}, rng);
  const Tensor lin_w = random_tensor({4, 3}, rng);
  const Tensor lin_b = random_tensor({3}, rng);
  const Tensor frame = random_tensor({2, 5, 5}, rng);
  return {
      {"add", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::add(x, g.constant(other)), seed); }},
      {"sub", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::sub(g.constant(other), x), seed); }},
      {"mul", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::mul(x, x), seed); }},
      {"scale", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::scale(x, -2.5), seed); }},
      {"neg", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::neg(x), seed); }},
      {"matmul_lhs", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::matmul(x, g.constant(mat)), seed); }},
      {"matmul_rhs", {4, 2}, [=](Graph& g, Var x) { return weighted(g, ops::matmul(g.constant(other), x), seed); }},
      {"conv_input", {2, 5, 5},
       [=](Graph& g, Var x) {
         return weighted(g, ops::conv2d(x, g.constant(kernel), g.constant(bias), 2, 1), seed);
       }},
      {"conv_kernel", {2, 2, 3, 3},
       [=](Graph& g, Var k) {
         return weighted(g, ops::conv2d(g.constant(frame), k, g.constant(bias), 1, 1), seed);
       }},
      {"conv_bias", {2},
       [=](Graph& g, Var b) {
         return weighted(g, ops::conv2d(g.constant(frame), g.constant(kernel), b, 2, 0), seed);
       }},
      {"relu", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::relu(x), seed); }},
      {"abs", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::abs(x), seed); }},
      {"clamp", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::clamp(x, -0.5, 0.5), seed); }},
      {"sum", {3, 4}, [=](Graph&, Var x) { return ops::sum(ops::mul(x, x)); }},
      {"mean", {3, 4}, [=](Graph&, Var x) { return ops::mean(ops::mul(x, x)); }},
      {"mean_axis0", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::mean_axis(x, 0), seed); }},
      {"mean_axis1", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::mean_axis(x, 1), seed); }},
      {"reshape", {3, 4}, [=](Graph& g, Var x) { return weighted(g, ops::reshape(x, {2, 6}), seed); }},
      {"concat", {4},
       [=](Graph& g, Var x) {
         std::vector<Var> parts{x, ops::scale(x, 3.0), g.constant(lin_b)};
         return weighted(g, ops::concat(parts), seed);
       }},
      {"stack", {4},
       [=](Graph& g, Var x) {
         std::vector<Var> parts{x, ops::mul(x, x)};
         return weighted(g, ops::stack(parts), seed);
       }},
      {"gather_rows", {3, 4},
       [=](Graph& g, Var x) {
         const std::vector<int> ids{2, 0, 2};
         return weighted(g, ops::gather_rows(x, ids), seed);
       }},
      {"log_softmax", {5}, [=](Graph& g, Var x) { return weighted(g, ops::log_softmax(x), seed); }},
      {"pick", {5}, [=](Graph&, Var x) { return ops::pick(ops::mul(x, x), 3); }},
      {"nll", {5}, [=](Graph&, Var x) { return ops::nll(ops::log_softmax(x), 1); }},
      {"linear_x", {4},
       [=](Graph& g, Var x) { return weighted(g, ops::linear(x, g.constant(lin_w), g.constant(lin_b)), seed); }},
      {"linear_w", {4, 3},
       [=](Graph& g, Var w) {
         return weighted(g, ops::linear(g.constant(Tensor({4}, {0.5, -0.1, 0.8, 0.2})), w, g.constant(lin_b)), seed);
       }},
      {"linear_b", {3},
       [=](Graph& g, Var b) {
         return weighted(g, ops::linear(g.constant(Tensor({4}, {0.1, -0.2, 0.3, 0.4})), g.constant(lin_w), b), seed);
       }},
  };
}

class EveryOp : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(EveryOp, MatchesCentralDifferences) {
  const std::uint64_t seed = GetParam();
  for (const auto& c : op_cases(seed)) {
    Rng rng(seed, fnv1a64(c.name));
    const Tensor x = random_tensor(c.input, rng);
    const auto r = grad_check_detailed(c.fn, x);
    EXPECT_LE(r.max_rel_error, 1e-6) << c.name << " seed " << seed << " at index " << r.worst_index;
  }
}

INSTANTIATE_TEST_SUITE_P(TenSeeds, EveryOp, ::testing::Range<std::uint64_t>(1, 11));

TEST(GradCheck, DetectsAWrongGradient) {
  // Square with a backward pass that forgets the factor of two.
  ScalarFn bad = [](Graph& g, Var x) {
    Tensor v = x.value();
    for (double& e : v.data()) e *= e;
    Var sq = g.record("bad_square", std::move(v), {x.id()}, [](Graph& gr, int self) {
      const int parent = gr.node(self).parents[0];
      const Tensor& up = gr.grad_of(self);
      const Tensor& in = gr.value_of(parent);
      Tensor& out = gr.grad_buffer(parent);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += up[i] * in[i];
    });
    return ops::sum(sq);
  };
  ScalarFn good = [](Graph&, Var x) { return ops::sum(ops::mul(x, x)); };
  const Tensor x({2}, {0.3, -0.4});
  EXPECT_LT(grad_check(good, x), 1e-8);
  EXPECT_GT(grad_check(bad, x), 0.1);
}

}  // namespace
}  // namespace advlm

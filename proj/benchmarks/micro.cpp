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


#include <benchmark/benchmark.h>

#include "advlm/attack.hpp"
#include "advlm/similarity.hpp"
#include "test_util.hpp"

namespace advlm {
namespace {

ToyVlm full_size_model() {
  return ToyVlm::initialize(ToyVlmConfig{}, testing::tiny_vocab(), 1);
}

void BM_Forward(benchmark::State& state) {
  const ToyVlm model = full_size_model();
  Rng rng(1);
  const auto seq = testing::random_sequence(rng, static_cast<std::size_t>(state.range(0)), 32, 32);
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, seq, "what should the car do at the intersection"));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(4)->Arg(8);

void BM_Conv2d(benchmark::State& state) {
  Rng rng(2);
  const Tensor x = testing::random_tensor({3, 32, 32}, rng);
  const Tensor k = testing::random_tensor({8, 3, 3, 3}, rng);
  const Tensor b = testing::random_tensor({8}, rng);
  for (auto _ : state) {
    Graph g;
    benchmark::DoNotOptimize(ops::conv2d(g.constant(x), g.constant(k), g.constant(b), 1, 1).value());
  }
}
BENCHMARK(BM_Conv2d);

void BM_AttentionMap(benchmark::State& state) {
  const ToyVlm model = full_size_model();
  Rng rng(3);
  const Frame f = testing::random_frame(rng, 3, 32, 32);
  const auto ids = model.encode_text("what should the car do at the intersection");
  for (auto _ : state) benchmark::DoNotOptimize(attention_map(model, f, ids));
}
BENCHMARK(BM_AttentionMap);

void BM_Ssim(benchmark::State& state) {
  Rng rng(4);
  const AttentionMap a(testing::random_tensor({32, 32}, rng, 0.0, 1.0));
  const AttentionMap b(testing::random_tensor({32, 32}, rng, 0.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(sim(a, b));
}
BENCHMARK(BM_Ssim);

void BM_AdvlmAttack(benchmark::State& state) {
  const ToyVlm model = full_size_model();
  Rng rng(5);
  std::vector<FrameSequence> probes{testing::random_sequence(rng, 2, 32, 32)};
  const PromptLibrary library = testing::tiny_library(model, probes, 2);
  const Scenario s = testing::tiny_scenario(rng, 6, 32);
  AttackConfig cfg;
  cfg.steps = static_cast<int>(state.range(0));
  cfg.prompt_width = 3;
  for (auto _ : state) {
    Rng r(1);
    benchmark::DoNotOptimize(advlm_attack(s, library, model, cfg, r));
  }
}
BENCHMARK(BM_AdvlmAttack)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace advlm

BENCHMARK_MAIN();

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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "advlm/prompt_library.hpp"
#include "advlm/rng.hpp"
#include "advlm/scenario.hpp"
#include "advlm/toy_vlm.hpp"

namespace advlm {

// Seed instructions the synthetic scenarios are prompted with.
const std::vector<SeedPrompt>& benchmark_seed_prompts();

struct BenchmarkOptions {
  std::size_t min_frames = 4;
  std::size_t max_frames = 8;
  double train_fraction = 0.8;
  int height = 32;
  int width = 32;
  double tint = 0.12;  // per-channel background lighting jitter
};

// Scenarios plus their train/eval assignment.
struct Benchmark {
  std::string name = "synthetic-drive";
  std::uint64_t seed = 0;
  std::vector<Scenario> scenarios;
  std::vector<bool> is_train;

  std::vector<Scenario> train() const;
  std::vector<Scenario> eval() const;
};

// Synthetic driving scenes: a colored marker whose color encodes the
// correct response drifts across noisy road frames and is occasionally
// occluded. Everything is drawn from rng.
Benchmark generate_benchmark(Rng& rng, std::size_t size, const BenchmarkOptions& options = {});

// Writes <dir>/manifest.json and <dir>/frames/<id>_<k>.advt. The manifest is
// {name, seed, scenarios:[{id, frames:[paths], prompt, label, target, split}]}
// with frame paths relative to the manifest.
void write_benchmark(const Benchmark& bench, const std::string& dir);
Benchmark load_benchmark(const std::string& manifest_path);

std::vector<TrainingSample> training_samples(const ToyVlm& model, std::span<const Scenario> scenarios);

}  // namespace advlm

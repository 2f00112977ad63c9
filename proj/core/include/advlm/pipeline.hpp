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
#include <string>
#include <vector>

#include "advlm/benchmark.hpp"
#include "advlm/embedding.hpp"
#include "advlm/prompt_library.hpp"
#include "advlm/toy_vlm.hpp"

namespace advlm {

// Word vectors with one shared direction per synonym rule: every word of a
// rule's phrase and alternatives leans towards it, so paraphrases stay close
// in embedding space. Words of the benchmark seed prompts are included.
EmbeddingTable synthesize_embeddings(std::uint64_t seed, std::size_t dim = EmbeddingTable::kDefaultDim);

// The embedding table bundled with the build, or synthesized when the data
// file is missing.
EmbeddingTable default_embeddings();
std::string bundled_embeddings_path();

// Every word of the embedding table, in table order.
Vocabulary vocabulary_from(const EmbeddingTable& table);

struct VictimOptions {
  int epochs = 40;
  double lr = 0.015;
  double embed_init_std = 1.5;
};

// Fresh model initialized from `seed` and trained on the benchmark's training split.
ToyVlm train_victim(const Benchmark& bench, const Vocabulary& vocab, std::uint64_t seed,
                    const VictimOptions& options = {}, TrainResult* result = nullptr);

// Frame sequences of the first `count` training scenarios.
std::vector<FrameSequence> library_probes(const Benchmark& bench, std::size_t count = 8);

PromptLibrary build_benchmark_library(const ToyVlm& reference, const Benchmark& bench,
                                      const EmbeddingTable& table, VariantGenerator& generator,
                                      std::uint64_t seed, std::size_t width = kDefaultLibraryWidth,
                                      double beta = kDefaultBeta, std::size_t probes = 8);

// Everything one seeded desk-scale run needs.
struct Workbench {
  Benchmark bench;
  ToyVlm victim;
  PromptLibrary library;
};

Workbench prepare_workbench(std::uint64_t seed, std::size_t benchmark_size = 200,
                            const VictimOptions& options = {});

}  // namespace advlm

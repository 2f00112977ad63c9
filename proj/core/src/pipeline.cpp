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

#include "advlm/pipeline.hpp"

#include <filesystem>
#include <map>

#include "advlm/variant_generator.hpp"

#ifndef ADVLM_DATA_DIR
#define ADVLM_DATA_DIR ""
#endif

namespace advlm {

EmbeddingTable synthesize_embeddings(std::uint64_t seed, std::size_t dim) {
  Rng rng(seed, 0x656d62);
  auto gaussian = [&] {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal();
    return v;
  };
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> acc;
  auto touch = [&](const std::string& w) -> std::vector<double>& {
    auto it = acc.find(w);
    if (it == acc.end()) {
      order.push_back(w);
      it = acc.emplace(w, std::vector<double>(dim, 0.0)).first;
    }
    return it->second;
  };
  for (const auto& rule : synonym_rules()) {
    const auto concept_dir = gaussian();
    std::vector<std::string> phrases{rule.phrase};
    phrases.insert(phrases.end(), rule.library.begin(), rule.library.end());
    phrases.insert(phrases.end(), rule.held_out.begin(), rule.held_out.end());
    for (const auto& p : phrases) {
      for (const auto& w : split_words(p)) {
        auto& v = touch(w);
        for (std::size_t i = 0; i < dim; ++i) v[i] += concept_dir[i];
      }
    }
  }
  for (const auto& s : benchmark_seed_prompts()) {
    for (const auto& w : split_words(s.text)) touch(w);
  }
  EmbeddingTable table(dim);
  for (const auto& w : order) {
    auto v = acc[w];
    const auto noise = gaussian();
    for (std::size_t i = 0; i < dim; ++i) v[i] += 0.5 * noise[i];
    table.insert(w, std::move(v));
  }
  return table;
}

std::string bundled_embeddings_path() {
  return (std::filesystem::path(ADVLM_DATA_DIR) / "embeddings.txt").string();
}

EmbeddingTable default_embeddings() {
  const std::string path = bundled_embeddings_path();
  if (std::filesystem::exists(path)) return EmbeddingTable::load(path);
  return synthesize_embeddings(0x5eed);
}

Vocabulary vocabulary_from(const EmbeddingTable& table) { return Vocabulary(table.words()); }

ToyVlm train_victim(const Benchmark& bench, const Vocabulary& vocab, std::uint64_t seed,
                    const VictimOptions& options, TrainResult* result) {
  ToyVlmConfig config;
  config.embed_init_std = options.embed_init_std;
  ToyVlm model = ToyVlm::initialize(config, vocab, seed);
  const auto train_set = bench.train();
  const auto samples = training_samples(model, train_set);
  Rng rng(seed, 0x747261696e);
  TrainResult r = train(model, samples, options.epochs, options.lr, rng);
  if (result != nullptr) *result = std::move(r);
  return model;
}

std::vector<FrameSequence> library_probes(const Benchmark& bench, std::size_t count) {
  std::vector<FrameSequence> out;
  for (const auto& s : bench.train()) {
    if (out.size() == count) break;
    out.push_back(s.frames);
  }
  return out;
}

PromptLibrary build_benchmark_library(const ToyVlm& reference, const Benchmark& bench,
                                      const EmbeddingTable& table, VariantGenerator& generator,
                                      std::uint64_t seed, std::size_t width, double beta, std::size_t probes) {
  const auto probe_set = library_probes(bench, probes);
  Rng rng(seed, 0x6c6962);
  return build_library(benchmark_seed_prompts(), width, beta, generator, reference, probe_set, table, rng);
}

Workbench prepare_workbench(std::uint64_t seed, std::size_t benchmark_size, const VictimOptions& options) {
  Workbench wb;
  Rng bench_rng(seed, 0x62656e6368);
  wb.bench = generate_benchmark(bench_rng, benchmark_size);
  const EmbeddingTable table = default_embeddings();
  wb.victim = train_victim(wb.bench, vocabulary_from(table), seed, options);
  RulesGenerator gen(SynonymPartition::kLibrary);
  wb.library = build_benchmark_library(wb.victim, wb.bench, table, gen, seed);
  return wb;
}

}  // namespace advlm

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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advlm/embedding.hpp"
#include "advlm/frames.hpp"
#include "advlm/rng.hpp"
#include "advlm/toy_vlm.hpp"
#include "advlm/variant_generator.hpp"

namespace advlm {

inline constexpr double kDefaultBeta = 0.5;
inline constexpr std::size_t kDefaultLibraryWidth = 5;
inline constexpr std::size_t kOversampling = 3;

// Natural-log Shannon entropy; zero-probability terms contribute 0.
double shannon_entropy(std::span<const double> probs);

// Entropy of the reference model's response distribution averaged over the
// probe sequences, all prompted with `prompt`.
double semantic_entropy(std::string_view prompt, const ToyVlm& reference,
                        std::span<const FrameSequence> probes);

// se + beta * d. Throws for beta < 0.
double penalty(double se, double d, double beta);

struct PromptVariant {
  std::string text;
  double se = 0.0;
  double d = 0.0;
  double b = 0.0;
};

struct SeedPrompt {
  std::string id;
  std::string text;
};

struct LibraryEntry {
  std::string seed_id;
  std::string seed;
  std::vector<PromptVariant> variants;  // ascending by (b, text)
  std::vector<PromptVariant> rejected;  // scored candidates that did not make the cut
};

class PromptLibrary {
 public:
  double beta = kDefaultBeta;
  std::size_t width = kDefaultLibraryWidth;
  std::string backend;
  std::vector<LibraryEntry> entries;

  const LibraryEntry& entry(std::string_view seed_id) const;
  // Entry whose seed text matches (after normalization), or nullptr.
  const LibraryEntry* find_seed(std::string_view seed_text) const;

  // JSON array of {seed_id, seed, beta, backend, variants:[{text, se, d, b}], rejected:[...]}.
  void save(const std::string& path) const;
  static PromptLibrary load(const std::string& path);
};

// Scores every generated candidate with the penalty and keeps, per seed, the
// `width` lowest (ties broken by text). Throws InvalidArgument naming the seed
// when the generator returns fewer than `width` unique candidates.
PromptLibrary build_library(std::span<const SeedPrompt> seeds, std::size_t width, double beta,
                            VariantGenerator& generator, const ToyVlm& reference,
                            std::span<const FrameSequence> probes, const EmbeddingTable& table,
                            Rng& rng);

// Seed text followed by its ranked variants.
std::vector<std::string> select(const PromptLibrary& library, std::string_view seed_id);

}  // namespace advlm

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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "advlm/rng.hpp"

namespace advlm {

// Produces paraphrases of a seed instruction. Results exclude the seed and
// contain no duplicates; fewer than `count` may come back.
class VariantGenerator {
 public:
  virtual ~VariantGenerator() = default;
  virtual std::string id() const = 0;
  virtual std::vector<std::string> generate(std::string_view seed, std::size_t count, Rng& rng) = 0;
};

// Which alternatives of the bundled synonym table a generator may use. The
// two halves are disjoint so held-out evaluation paraphrases never reuse a
// substitution seen while building the attack library.
enum class SynonymPartition { kLibrary, kHeldOut };

struct SynonymRule {
  std::string phrase;
  std::vector<std::string> library;
  std::vector<std::string> held_out;
};

const std::vector<SynonymRule>& synonym_rules();

// Lowercased, single-spaced word form used for matching and deduplication.
std::string normalize_text(std::string_view text);

// Deterministic table-driven paraphraser. Single substitutions come first in
// table order; further candidates combine substitutions drawn from rng.
class RulesGenerator final : public VariantGenerator {
 public:
  explicit RulesGenerator(SynonymPartition partition = SynonymPartition::kLibrary)
      : partition_(partition) {}

  std::string id() const override;
  std::vector<std::string> generate(std::string_view seed, std::size_t count, Rng& rng) override;

 private:
  SynonymPartition partition_;
};

struct HttpGeneratorOptions {
  std::string endpoint;  // e.g. http://localhost:8080/v1/chat/completions
  std::string model = "gpt-4o";
  std::string api_key_env = "ADVLM_LLM_KEY";
  double temperature = 0.7;
  int timeout_seconds = 30;
};

// OpenAI-chat-compatible client. Request: {model, messages:[system, user],
// temperature, seed}. Reads choices[0].message.content and takes one
// paraphrase per non-empty line, stripping list markers and quotes.
class HttpGenerator final : public VariantGenerator {
 public:
  explicit HttpGenerator(HttpGeneratorOptions options);

  std::string id() const override;
  std::vector<std::string> generate(std::string_view seed, std::size_t count, Rng& rng) override;

  // Exposed for tests.
  static std::vector<std::string> parse_lines(std::string_view content);

 private:
  HttpGeneratorOptions options_;
};

// "rules", "rules:held-out" or "http" (needs options.endpoint).
std::unique_ptr<VariantGenerator> make_generator(std::string_view backend,
                                                 const HttpGeneratorOptions& http = {});

}  // namespace advlm

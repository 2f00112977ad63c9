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

#include "advlm/prompt_library.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "advlm/error.hpp"

namespace advlm {

double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw InvalidArgument("shannon_entropy: negative probability");
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double semantic_entropy(std::string_view prompt, const ToyVlm& reference,
                        std::span<const FrameSequence> probes) {
  if (probes.empty()) throw InvalidArgument("semantic_entropy: empty probe set");
  const auto ids = reference.encode_text(prompt);
  std::vector<double> mean(static_cast<std::size_t>(reference.config().num_classes), 0.0);
  for (const FrameSequence& seq : probes) {
    const Tensor logp = forward(reference, seq.frames, ids);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += std::exp(logp[k]);
  }
  for (double& p : mean) p /= static_cast<double>(probes.size());
  return shannon_entropy(mean);
}

double penalty(double se, double d, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("penalty: beta must be >= 0");
  return se + beta * d;
}

const LibraryEntry& PromptLibrary::entry(std::string_view seed_id) const {
  for (const auto& e : entries) {
    if (e.seed_id == seed_id) return e;
  }
  throw InvalidArgument("prompt library has no seed '" + std::string(seed_id) + "'");
}

const LibraryEntry* PromptLibrary::find_seed(std::string_view seed_text) const {
  const std::string key = normalize_text(seed_text);
  for (const auto& e : entries) {
    if (normalize_text(e.seed) == key) return &e;
  }
  return nullptr;
}

namespace {

nlohmann::json to_json(const PromptVariant& v) {
  return {{"text", v.text}, {"se", v.se}, {"d", v.d}, {"b", v.b}};
}

PromptVariant variant_from_json(const nlohmann::json& j) {
  return {j.at("text").get<std::string>(), j.at("se").get<double>(), j.at("d").get<double>(),
          j.at("b").get<double>()};
}

bool variant_less(const PromptVariant& a, const PromptVariant& b) {
  if (a.b != b.b) return a.b < b.b;
  return a.text < b.text;
}

}  // namespace

void PromptLibrary::save(const std::string& path) const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& v : e.variants) variants.push_back(to_json(v));
    nlohmann::json rejected = nlohmann::json::array();
    for (const auto& v : e.rejected) rejected.push_back(to_json(v));
    arr.push_back({{"seed_id", e.seed_id},
                   {"seed", e.seed},
                   {"beta", beta},
                   {"backend", backend},
                   {"variants", variants},
                   {"rejected", rejected}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write prompt library " + path);
  out << arr.dump(2) << '\n';
}

PromptLibrary PromptLibrary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read prompt library " + path);
  PromptLibrary lib;
  try {
    auto arr = nlohmann::json::parse(in);
    if (!arr.is_array() || arr.empty()) throw IoError("prompt library " + path + " has no entries");
    lib.beta = arr[0].at("beta").get<double>();
    lib.backend = arr[0].value("backend", "");
    lib.width = arr[0].at("variants").size();
    for (const auto& j : arr) {
      LibraryEntry e;
      e.seed_id = j.at("seed_id").get<std::string>();
      e.seed = j.at("seed").get<std::string>();
      for (const auto& v : j.at("variants")) e.variants.push_back(variant_from_json(v));
      if (j.contains("rejected")) {
        for (const auto& v : j.at("rejected")) e.rejected.push_back(variant_from_json(v));
      }
      if (e.variants.size() != lib.width) throw IoError("prompt library " + path + ": uneven widths");
      if (!std::is_sorted(e.variants.begin(), e.variants.end(), variant_less)) {
        throw IoError("prompt library " + path + ": variants of " + e.seed_id + " not ranked");
      }
      lib.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("prompt library " + path + ": " + e.what());
  }
  return lib;
}

PromptLibrary build_library(std::span<const SeedPrompt> seeds, std::size_t width, double beta,
                            VariantGenerator& generator, const ToyVlm& reference,
                            std::span<const FrameSequence> probes, const EmbeddingTable& table,
                            Rng& rng) {
  if (width < 1) throw InvalidArgument("build_library: width must be >= 1");
  if (!(beta >= 0.0)) throw InvalidArgument("build_library: beta must be >= 0");
  PromptLibrary lib;
  lib.beta = beta;
  lib.width = width;
  lib.backend = generator.id();
  std::set<std::string> ids;
  for (const SeedPrompt& seed : seeds) {
    if (!ids.insert(seed.id).second) throw InvalidArgument("build_library: duplicate seed id " + seed.id);
    auto candidates = generator.generate(seed.text, kOversampling * width, rng);
    std::set<std::string> unique;
    const std::string seed_norm = normalize_text(seed.text);
    std::vector<PromptVariant> scored;
    for (const auto& c : candidates) {
      std::string text = normalize_text(c);
      if (text.empty() || text == seed_norm || !unique.insert(text).second) continue;
      PromptVariant v;
      v.se = semantic_entropy(text, reference, probes);
      v.d = diversity(seed.text, text, table);
      v.b = penalty(v.se, v.d, beta);
      v.text = std::move(text);
      scored.push_back(std::move(v));
    }
    if (scored.size() < width) {
      throw InvalidArgument("build_library: seed '" + seed.id + "' yields " + std::to_string(scored.size()) +
                            " unique candidates, width " + std::to_string(width) + " required");
    }
    std::sort(scored.begin(), scored.end(), variant_less);
    LibraryEntry e;
    e.seed_id = seed.id;
    e.seed = seed.text;
    e.variants.assign(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(width));
    e.rejected.assign(scored.begin() + static_cast<std::ptrdiff_t>(width), scored.end());
    lib.entries.push_back(std::move(e));
  }
  return lib;
}

std::vector<std::string> select(const PromptLibrary& library, std::string_view seed_id) {
  const LibraryEntry& e = library.entry(seed_id);
  std::vector<std::string> out{e.seed};
  for (const auto& v : e.variants) out.push_back(v.text);
  return out;
}

}  // namespace advlm

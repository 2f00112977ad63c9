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

#include "advlm/variant_generator.hpp"

#include <algorithm>
#include <set>

#include "advlm/error.hpp"
#include "advlm/toy_vlm.hpp"

namespace advlm {

const std::vector<SynonymRule>& synonym_rules() {
  // Longer phrases precede the single words they contain so that matching
  // (first rule wins, no overlaps) prefers the phrase.
  static const std::vector<SynonymRule> rules{
      {"turn left", {"go left", "make a left"}, {"steer left", "bear left"}},
      {"at the intersection", {"ahead", "at the junction"}, {"at the crossing", "at the crossroads"}},
      {"what should", {"what must", "what would"}, {"what ought", "which way should"}},
      {"how should", {"in what way should", "how must"}, {"how ought", "by which means should"}},
      {"the car", {"the vehicle", "our car"}, {"the automobile", "my auto"}},
      {"the vehicle", {"the car", "our vehicle"}, {"the automobile", "this auto"}},
      {"do", {"do next", "perform"}, {"execute", "carry out"}},
      {"proceed", {"continue", "go on"}, {"advance", "move along"}},
      {"on this road", {"on this street", "here"}, {"along this roadway", "on this lane"}},
      {"what is", {"tell me", "name"}, {"identify", "state"}},
      {"correct", {"proper", "valid"}, {"appropriate", "suitable"}},
      {"driving action", {"driving move", "action"}, {"maneuver to make", "driving decision"}},
      {"now", {"at this moment", "immediately"}, {"currently", "at present"}},
      {"decide", {"determine", "pick"}, {"settle", "figure out"}},
      {"next maneuver", {"next move", "coming maneuver"}, {"following maneuver", "subsequent action"}},
      {"ego car", {"ego vehicle", "own car"}, {"host automobile", "subject auto"}},
      {"action", {"move", "step"}, {"measure", "response"}},
      {"driver", {"motorist", "operator"}, {"pilot", "chauffeur"}},
      {"take", {"make", "choose"}, {"adopt", "pursue"}},
      {"ahead", {"up ahead", "in front"}, {"forward", "further on"}},
      {"given", {"considering", "based on"}, {"looking at", "regarding"}},
      {"road markers", {"road signs", "markings"}, {"lane markers", "signals"}},
      {"choose", {"pick out", "select"}, {"opt for", "decide on"}},
      {"safe", {"secure", "careful"}, {"prudent", "cautious"}},
      {"driving response", {"driving reaction", "reaction"}, {"road reply", "reply"}},
      {"for this scene", {"for this situation", "here"}, {"in this setting", "for this view"}},
      {"drive through", {"pass through", "get through"}, {"navigate", "traverse"}},
      {"upcoming section", {"next section", "coming stretch"}, {"approaching segment", "forthcoming part"}},
  };
  return rules;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  for (const auto& w : split_words(text)) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

namespace {

struct Site {
  std::size_t start = 0;
  std::size_t length = 0;
  const std::vector<std::string>* alternatives = nullptr;
};

std::vector<Site> find_sites(const std::vector<std::string>& words, SynonymPartition partition) {
  std::vector<bool> covered(words.size(), false);
  std::vector<Site> sites;
  for (const auto& rule : synonym_rules()) {
    const auto phrase = split_words(rule.phrase);
    if (phrase.empty() || phrase.size() > words.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= words.size(); ++i) {
      bool match = true;
      for (std::size_t j = 0; j < phrase.size() && match; ++j) {
        match = !covered[i + j] && words[i + j] == phrase[j];
      }
      if (!match) continue;
      for (std::size_t j = 0; j < phrase.size(); ++j) covered[i + j] = true;
      const auto& alts = partition == SynonymPartition::kLibrary ? rule.library : rule.held_out;
      sites.push_back({i, phrase.size(), &alts});
      break;
    }
  }
  return sites;
}

// choice[s] == 0 keeps the original words at site s, k > 0 picks alternative k - 1.
std::string render(const std::vector<std::string>& words, const std::vector<Site>& sites,
                   const std::vector<std::size_t>& choice) {
  std::vector<std::size_t> order(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sites[a].start < sites[b].start; });
  std::string out;
  std::size_t pos = 0;
  auto emit = [&out](std::string_view w) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  };
  for (std::size_t s : order) {
    for (; pos < sites[s].start; ++pos) emit(words[pos]);
    if (choice[s] == 0) {
      for (std::size_t j = 0; j < sites[s].length; ++j) emit(words[pos + j]);
    } else {
      emit((*sites[s].alternatives)[choice[s] - 1]);
    }
    pos = sites[s].start + sites[s].length;
  }
  for (; pos < words.size(); ++pos) emit(words[pos]);
  return out;
}

}  // namespace

std::string RulesGenerator::id() const {
  return partition_ == SynonymPartition::kLibrary ? "rules" : "rules:held-out";
}

std::vector<std::string> RulesGenerator::generate(std::string_view seed, std::size_t count, Rng& rng) {
  if (count < 1) throw InvalidArgument("generate_variants: count must be >= 1");
  const auto words = split_words(seed);
  const std::string seed_norm = normalize_text(seed);
  const auto sites = find_sites(words, partition_);
  std::vector<std::string> out;
  std::set<std::string> seen{seed_norm};
  auto offer = [&](std::string text) {
    if (out.size() < count && seen.insert(text).second) out.push_back(std::move(text));
  };
  std::vector<std::size_t> choice(sites.size(), 0);
  for (std::size_t s = 0; s < sites.size() && out.size() < count; ++s) {
    for (std::size_t k = 1; k <= sites[s].alternatives->size(); ++k) {
      choice.assign(sites.size(), 0);
      choice[s] = k;
      offer(render(words, sites, choice));
    }
  }
  if (sites.size() < 2) return out;
  const std::size_t attempts = 64 * count;
  for (std::size_t a = 0; a < attempts && out.size() < count; ++a) {
    std::size_t changed = 0;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      choice[s] = rng.uniform_int(static_cast<std::uint32_t>(sites[s].alternatives->size() + 1));
      changed += choice[s] != 0;
    }
    if (changed >= 2) offer(render(words, sites, choice));
  }
  return out;
}

std::unique_ptr<VariantGenerator> make_generator(std::string_view backend, const HttpGeneratorOptions& http) {
  if (backend == "rules") return std::make_unique<RulesGenerator>(SynonymPartition::kLibrary);
  if (backend == "rules:held-out") return std::make_unique<RulesGenerator>(SynonymPartition::kHeldOut);
  if (backend == "http") return std::make_unique<HttpGenerator>(http);
  throw InvalidArgument("unknown generator backend '" + std::string(backend) + "'");
}

}  // namespace advlm

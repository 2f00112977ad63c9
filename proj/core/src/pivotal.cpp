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

#include "advlm/pivotal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advlm/error.hpp"
#include "advlm/similarity.hpp"

namespace advlm {

double frame_set_similarity(const AttentionMap& candidate, std::span<const AttentionMap> selected) {
  if (selected.empty()) throw InvalidArgument("frame_set_similarity: empty selected set");
  return sim(candidate, mean_map(selected));
}

double frame_set_similarity(const ToyVlm& model, const Frame& candidate,
                            std::span<const Frame> selected, std::span<const int> prompt_ids) {
  if (selected.empty()) throw InvalidArgument("frame_set_similarity: empty selected set");
  std::vector<AttentionMap> maps;
  for (const Frame& f : selected) maps.push_back(attention_map(model, f, prompt_ids));
  return frame_set_similarity(attention_map(model, candidate, prompt_ids), maps);
}

PivotalSelection select_pivotal(std::span<const AttentionMap> maps, std::size_t k) {
  if (k < 1 || k > maps.size()) {
    throw InvalidArgument("select_pivotal: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(maps.size()) + "]");
  }
  const std::size_t n = maps.size();
  PivotalSelection out;
  std::vector<bool> taken(n, false);
  out.picks.push_back(0);
  taken[0] = true;
  // Running sum of selected maps, in selection order.
  Tensor running = maps[0].values();
  Tensor mean(running.shape());
  while (out.picks.size() < k) {
    const double count = static_cast<double>(out.picks.size());
    for (std::size_t i = 0; i < running.size(); ++i) mean[i] = running[i] / count;
    std::size_t best = n;
    double best_sim = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double s = sim(maps[i].values().data(), mean.data());
      if (s < best_sim) {
        best_sim = s;
        best = i;
      }
    }
    taken[best] = true;
    out.picks.push_back(best);
    for (std::size_t i = 0; i < running.size(); ++i) running[i] += maps[best].values()[i];
  }
  out.indices = out.picks;
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

std::vector<AttentionMap> sequence_attention(const ToyVlm& model, const FrameSequence& seq,
                                             std::span<const int> prompt_ids) {
  std::vector<AttentionMap> maps;
  maps.reserve(seq.size());
  for (const Frame& f : seq.frames) maps.push_back(attention_map(model, f, prompt_ids));
  return maps;
}

FrameSequence select_pivotal_frames(const FrameSequence& seq, std::size_t k, const ToyVlm& model,
                                    std::span<const int> prompt_ids) {
  if (k < 1 || k > seq.size()) {
    throw InvalidArgument("select_pivotal_frames: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(seq.size()) + "]");
  }
  if (k == 1) return FrameSequence(seq.scenario_id, {seq.frames[0]});
  auto maps = sequence_attention(model, seq, prompt_ids);
  PivotalSelection sel = select_pivotal(maps, k);
  std::vector<Frame> frames;
  for (std::size_t i : sel.indices) frames.push_back(seq.frames[i]);
  return FrameSequence(seq.scenario_id, std::move(frames));
}

PivotalVerification verify_pivotal(std::span<const AttentionMap> maps,
                                   std::span<const std::size_t> picks) {
  if (picks.empty()) throw InvalidArgument("verify_pivotal: no picks");
  const std::size_t n = maps.size();
  PivotalVerification report;
  // steps[i] describes pick i; the first pick is fixed to frame 0.
  PivotalStep first;
  first.chosen = picks[0];
  first.similarity.assign(n, std::numeric_limits<double>::quiet_NaN());
  report.steps.push_back(std::move(first));
  if (picks[0] != 0) {
    report.verified = false;
    report.first_bad_step = 0;
  }
  for (std::size_t step = 1; step < picks.size(); ++step) {
    std::vector<AttentionMap> selected;
    for (std::size_t s = 0; s < step; ++s) selected.push_back(maps[picks[s]]);
    PivotalStep rec;
    rec.chosen = picks[step];
    rec.similarity.assign(n, std::numeric_limits<double>::quiet_NaN());
    // Selection mean recomputed from scratch, summed in selection order.
    Tensor mean = selected[0].values();
    for (std::size_t s = 1; s < selected.size(); ++s)
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += selected[s].values()[i];
    for (double& v : mean.data()) v /= static_cast<double>(selected.size());
    bool have = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(picks.begin(), picks.begin() + static_cast<std::ptrdiff_t>(step), i) !=
          picks.begin() + static_cast<std::ptrdiff_t>(step)) {
        continue;
      }
      rec.similarity[i] = sim(maps[i].values().data(), mean.data());
      if (!have || rec.similarity[i] < rec.similarity[rec.expected]) {
        rec.expected = i;
        have = true;
      }
    }
    if (!have || rec.chosen != rec.expected) {
      if (report.verified) report.first_bad_step = step;
      report.verified = false;
    }
    report.steps.push_back(std::move(rec));
  }
  return report;
}

PivotalVerification brute_force_pivotal(const FrameSequence& seq, std::size_t k, const ToyVlm& model,
                                        std::span<const int> prompt_ids) {
  if (seq.size() > kBruteForceMaxFrames) {
    throw InvalidArgument("brute_force_pivotal: " + std::to_string(seq.size()) +
                          " frames exceeds cap of " + std::to_string(kBruteForceMaxFrames));
  }
  auto maps = sequence_attention(model, seq, prompt_ids);
  PivotalSelection sel = select_pivotal(maps, k);
  return verify_pivotal(maps, sel.picks);
}

}  // namespace advlm

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
#include <optional>
#include <span>
#include <vector>

#include "advlm/frames.hpp"
#include "advlm/toy_vlm.hpp"

namespace advlm {

// Sim(candidate, mean of selected maps).
double frame_set_similarity(const AttentionMap& candidate, std::span<const AttentionMap> selected);
double frame_set_similarity(const ToyVlm& model, const Frame& candidate,
                            std::span<const Frame> selected, std::span<const int> prompt_ids);

struct PivotalSelection {
  std::vector<std::size_t> picks;    // selection order, picks[0] == 0
  std::vector<std::size_t> indices;  // sorted ascending
};

// Greedy diversity selection: start from frame 0, then repeatedly add the
// unselected frame least similar to the mean map of the selection. Ties go
// to the lowest index. Requires 1 <= k <= maps.size().
PivotalSelection select_pivotal(std::span<const AttentionMap> maps, std::size_t k);

std::vector<AttentionMap> sequence_attention(const ToyVlm& model, const FrameSequence& seq,
                                             std::span<const int> prompt_ids);

// Selected frames in original order.
FrameSequence select_pivotal_frames(const FrameSequence& seq, std::size_t k, const ToyVlm& model,
                                    std::span<const int> prompt_ids);

struct PivotalStep {
  std::size_t chosen = 0;
  std::size_t expected = 0;  // exhaustive argmin, lowest index on ties
  std::vector<double> similarity;  // per frame; NaN for already-selected frames
};

struct PivotalVerification {
  bool verified = true;
  std::optional<std::size_t> first_bad_step;
  std::vector<PivotalStep> steps;  // one per pick, in selection order
};

inline constexpr std::size_t kBruteForceMaxFrames = 8;

// Replays a pick sequence, scanning every candidate at every step from a
// freshly recomputed selection mean, and checks each pick is a true argmin.
PivotalVerification verify_pivotal(std::span<const AttentionMap> maps,
                                   std::span<const std::size_t> picks);

// Runs the greedy selector on the sequence and verifies it. Limited to
// kBruteForceMaxFrames frames.
PivotalVerification brute_force_pivotal(const FrameSequence& seq, std::size_t k, const ToyVlm& model,
                                        std::span<const int> prompt_ids);

}  // namespace advlm

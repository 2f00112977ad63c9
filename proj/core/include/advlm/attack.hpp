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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advlm/autograd.hpp"
#include "advlm/prompt_library.hpp"
#include "advlm/rng.hpp"
#include "advlm/scenario.hpp"
#include "advlm/toy_vlm.hpp"
#include "advlm/warp.hpp"

namespace advlm {

enum class AttackMode { kTargeted, kUntargeted };

std::string to_string(AttackMode mode);
AttackMode parse_attack_mode(std::string_view text);

// One additive pattern shared by every frame of a sequence.
struct Perturbation {
  Tensor delta;
  double epsilon = 0.0;

  static Perturbation zeros(const Shape& frame_shape, double epsilon) {
    return {Tensor::zeros(frame_shape), epsilon};
  }
};

struct AttackConfig {
  double epsilon = 0.1;
  int steps = 50;
  std::optional<double> step_size;  // defaults to 2 * epsilon / steps
  double lambda = 0.4;
  std::size_t pivotal_frames = 6;
  std::size_t prompt_width = 3;  // texts taken from select(): the seed plus width - 1 variants
  AttackMode mode = AttackMode::kTargeted;
  std::uint64_t seed = 0;
  int transforms_per_step = 1;
  bool use_transforms = true;
  bool use_pivotal = true;       // false: the scene term uses every frame
  bool reselect_pivotal = false;  // re-run frame selection on perturbed frames every step
  AffineRanges ranges;

  double alpha() const { return step_size.value_or(2.0 * epsilon / steps); }
  void validate() const;
};

// Every field, with the effective step size, for config echoes.
nlohmann::json to_json(const AttackConfig& cfg);

struct AttackStep {
  double l_image = 0.0;
  double l_scene = 0.0;
  double l_attack = 0.0;
  double linf = 0.0;       // after the update
  double best_loss = 0.0;  // running minimum of l_attack
};

struct AttackTrace {
  std::vector<AttackStep> steps;
  std::size_t best_step = 0;
  double initial_target_prob = 0.0;
  double final_target_prob = 0.0;

  void save_csv(const std::string& path) const;
};

struct AttackResult {
  Perturbation perturbation;
  AttackTrace trace;
};

// Adds delta to every frame and clamps pixels to [0, 1].
FrameSequence apply(const FrameSequence& seq, const Perturbation& p);

// clamp(frame + delta, 0, 1) on the graph.
Var perturb(Graph& g, const Frame& frame, Var delta);

// Per-prompt loss term: -log p(target) when targeted, +log p(label) when not.
Var response_loss(Var log_probs, const Scenario& scenario, AttackMode mode);

// Image-wise loss: each frame warped by views[i], perturbed, then the term
// summed over prompts.
Var loss_image(const BoundVlm& model, const Scenario& scenario,
               std::span<const std::vector<int>> prompts, Var delta,
               std::span<const AffineParams> views, AttackMode mode);

// Scene-wise loss over the pivotal frames, summed over prompts.
Var loss_scene(const BoundVlm& model, const Scenario& scenario, std::span<const Frame> pivotal,
               std::span<const std::vector<int>> prompts, Var delta, AttackMode mode);

// (1 - lambda) * image + lambda * scene. Throws for lambda outside [0, 1].
Var loss_attack(Var image, Var scene, double lambda);

// Prompt texts the attack optimizes over for this scenario.
std::vector<std::string> attack_prompts(const PromptLibrary& library, const Scenario& scenario,
                                        std::size_t width);

// Values of the three losses for a fixed delta; views drawn from rng as the
// attack would on its first step.
struct LossValues {
  double image = 0.0;
  double scene = 0.0;
  double attack = 0.0;
};
LossValues evaluate_losses(const Scenario& scenario, const PromptLibrary& library, const Tensor& delta,
                           const ToyVlm& model, const AttackConfig& cfg, Rng& rng);

AttackResult advlm_attack(const Scenario& scenario, const PromptLibrary& library, const ToyVlm& model,
                          const AttackConfig& cfg, Rng& rng);

// One delta optimized jointly for every scenario (sum of their losses).
AttackResult advlm_attack_universal(std::span<const Scenario> scenarios, const PromptLibrary& library,
                                    const ToyVlm& model, const AttackConfig& cfg, Rng& rng);

Perturbation fgsm_attack(const Scenario& scenario, std::string_view prompt, const ToyVlm& model,
                         const AttackConfig& cfg);

AttackResult pgd_attack(const Scenario& scenario, std::string_view prompt, const ToyVlm& model,
                        const AttackConfig& cfg, Rng& rng);

double target_probability(const ToyVlm& model, const FrameSequence& seq, std::string_view prompt,
                          int target_class);

struct PerturbationMeta {
  std::string scenario_id;
  std::string method;
  AttackConfig config;
  int target = 0;
};

// <stem>.advt plus <stem>.json {epsilon, steps, alpha, lambda, seed, scenario_id, mode, target, method}.
void save_perturbation(const std::string& stem, const Perturbation& p, const PerturbationMeta& meta);
Perturbation load_perturbation(const std::string& stem);

}  // namespace advlm

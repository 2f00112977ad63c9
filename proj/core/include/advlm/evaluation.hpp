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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advlm/attack.hpp"
#include "advlm/benchmark.hpp"
#include "advlm/prompt_library.hpp"
#include "advlm/toy_vlm.hpp"

namespace advlm {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be written
// to per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Paraphrases from the held-out synonym partition, deterministic per seed text.
std::vector<std::string> held_out_paraphrases(std::string_view seed, std::size_t k);

// Prompts scored for a scenario: the seed alone (k == 0) or k held-out
// paraphrases.
std::vector<std::string> evaluation_prompts(const Scenario& scenario, std::size_t paraphrases);

// Fraction of prompts for which argmax response == label.
double prompt_accuracy(const ToyVlm& model, std::span<const Frame> frames,
                       std::span<const std::string> prompts, int label);

// 100 x mean over scenarios of prompt_accuracy on clean, un-warped frames.
double task_score(const ToyVlm& model, std::span<const Scenario> scenarios, std::size_t paraphrases);

struct EvalOptions {
  std::vector<std::size_t> paraphrase_modes{0, 3, 5};
  bool warped_views = true;
  std::uint64_t view_seed = 0x76696577;
  int jobs = 1;
};

std::string mode_name(std::size_t paraphrases);

// Per-frame views used at evaluation time; identity when warping is off.
std::vector<AffineParams> evaluation_views(const Scenario& scenario, const EvalOptions& options,
                                           const AffineRanges& ranges);

// The frames a scenario is scored on: each evaluation view applied to the
// clean frame, then delta added.
std::vector<Frame> evaluation_frames(const Scenario& scenario, const Perturbation* delta,
                                     const EvalOptions& options, const AffineRanges& ranges);

struct MethodScores {
  std::string method;
  std::map<std::string, double> clean;     // per mode, 0..100
  std::map<std::string, double> attacked;  // per mode
  std::map<std::string, double> drop;      // clean - attacked
  double mean_linf = 0.0;
};

struct ScenarioRow {
  std::string scenario_id;
  std::string method;
  std::map<std::string, double> clean;
  std::map<std::string, double> attacked;
  double linf = 0.0;
  double target_prob = 0.0;
};

struct EvalReport {
  nlohmann::json config;
  std::vector<MethodScores> methods;
  std::vector<ScenarioRow> rows;
  nlohmann::json extra = nlohmann::json::object();

  const MethodScores& method(std::string_view name) const;
  nlohmann::json to_json() const;
  // Writes report.json, summary.csv and scenarios.csv into dir.
  void save(const std::string& dir) const;
};

// Crafts a perturbation for one scenario with the named method: "advlm",
// "pgd", "fgsm" or "none" (zero control).
Perturbation craft(std::string_view method, const Scenario& scenario, const PromptLibrary& library,
                   const ToyVlm& model, const AttackConfig& cfg);

// Same perturbation as craft() together with its optimization trace (empty
// for the single-step and zero methods).
AttackResult craft_attack(std::string_view method, const Scenario& scenario, const PromptLibrary& library,
                          const ToyVlm& model, const AttackConfig& cfg);

// Perturbations are crafted on `source` and scored on `victim`.
EvalReport evaluate_methods(std::span<const std::string> methods, std::span<const Scenario> scenarios,
                            const PromptLibrary& library, const ToyVlm& source, const ToyVlm& victim,
                            const AttackConfig& cfg, const EvalOptions& options);

EvalReport run_attack_eval(std::span<const std::string> methods, std::span<const Scenario> scenarios,
                           const PromptLibrary& library, const ToyVlm& model, const AttackConfig& cfg,
                           const EvalOptions& options = {});

// Black-box transfer: throws InvalidArgument when both models share a seed
// unless they are the same object.
EvalReport transfer_eval(const ToyVlm& source, const ToyVlm& victim, std::span<const std::string> methods,
                         std::span<const Scenario> scenarios, const PromptLibrary& source_library,
                         const AttackConfig& cfg, const EvalOptions& options = {});

struct AttentionRow {
  std::string scenario_id;
  double ssim_before = 0, pcc_before = 0, sim_before = 0;
  double ssim_after = 0, pcc_after = 0, sim_after = 0;
  // Same statistics across warped views of the seed prompt.
  double view_sim_before = 0, view_sim_after = 0;
};

struct AttentionTable {
  std::vector<AttentionRow> rows;
  double ssim_before = 0, pcc_before = 0, ssim_after = 0, pcc_after = 0;
  double sim_before = 0, sim_after = 0;
  double fraction_decreased = 0;  // share of scenarios whose prompt sim fell
  nlohmann::json to_json() const;
};

// Mean pairwise attention-map similarity across the attack prompts (and
// across `views` warped views), with and without each scenario's delta.
AttentionTable attention_divergence(const ToyVlm& model, std::span<const Scenario> scenarios,
                                    std::span<const Perturbation> deltas, const PromptLibrary& library,
                                    const AttackConfig& cfg, std::size_t views = 3, int jobs = 1);

enum class AblationAxis { kSteps, kBudget, kPrompts, kLambda, kFrames, kSae };

AblationAxis parse_ablation_axis(std::string_view name);
std::string to_string(AblationAxis axis);
std::vector<double> default_ablation_values(AblationAxis axis);
// Config for one sweep point.
AttackConfig ablation_config(AblationAxis axis, double value, const AttackConfig& base);

struct AblationRow {
  double value = 0;
  double clean = 0;
  double attacked = 0;
  double drop = 0;
};

// One ADvLM attack-eval per value, scored in seed-only mode.
std::vector<AblationRow> ablation_sweep(AblationAxis axis, std::span<const double> values,
                                        std::span<const Scenario> scenarios, const PromptLibrary& library,
                                        const ToyVlm& model, const AttackConfig& base,
                                        const EvalOptions& options = {});

// "value,clean,attacked,drop"
void write_ablation_csv(const std::string& path, std::span<const AblationRow> rows);

}  // namespace advlm

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

#include "advlm/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>

#include "advlm/error.hpp"
#include "advlm/pivotal.hpp"

namespace advlm {

std::string to_string(AttackMode mode) {
  return mode == AttackMode::kTargeted ? "targeted" : "untargeted";
}

AttackMode parse_attack_mode(std::string_view text) {
  if (text == "targeted") return AttackMode::kTargeted;
  if (text == "untargeted") return AttackMode::kUntargeted;
  throw InvalidArgument("unknown attack mode '" + std::string(text) + "'");
}

void AttackConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("attack config: epsilon must be > 0");
  if (steps < 1) throw InvalidArgument("attack config: steps must be >= 1");
  if (!(alpha() > 0.0)) throw InvalidArgument("attack config: step size must be > 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("attack config: lambda must lie in [0, 1]");
  if (pivotal_frames < 1) throw InvalidArgument("attack config: pivotal frame count must be >= 1");
  if (prompt_width < 1) throw InvalidArgument("attack config: prompt width must be >= 1");
  if (transforms_per_step < 1) throw InvalidArgument("attack config: transforms per step must be >= 1");
  ranges.validate();
}

FrameSequence apply(const FrameSequence& seq, const Perturbation& p) {
  if (p.delta.shape() != seq.frame_shape()) {
    throw ShapeError("apply: perturbation " + shape_str(p.delta.shape()) + " vs frame " +
                     shape_str(seq.frame_shape()));
  }
  std::vector<Frame> out;
  out.reserve(seq.size());
  for (const Frame& f : seq.frames) {
    Tensor t = f.pixels();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::clamp(t[i] + p.delta[i], 0.0, 1.0);
    out.emplace_back(std::move(t));
  }
  return FrameSequence(seq.scenario_id, std::move(out));
}

Var perturb(Graph& g, const Frame& frame, Var delta) {
  return ops::clamp(ops::add(g.constant(frame.pixels()), delta), 0.0, 1.0);
}

Var response_loss(Var log_probs, const Scenario& scenario, AttackMode mode) {
  if (mode == AttackMode::kTargeted) return ops::nll(log_probs, static_cast<std::size_t>(scenario.target));
  return ops::pick(log_probs, static_cast<std::size_t>(scenario.label));
}

namespace {

Var sum_over_prompts(const BoundVlm& model, Var visual, std::span<const std::vector<int>> prompts,
                     const Scenario& scenario, AttackMode mode) {
  if (prompts.empty()) throw InvalidArgument("attack loss: no prompts");
  Var total;
  for (const auto& ids : prompts) {
    Var term = response_loss(model.respond(model.encode_prompt(ids), visual), scenario, mode);
    total = total.valid() ? ops::add(total, term) : term;
  }
  return total;
}

}  // namespace

Var loss_image(const BoundVlm& model, const Scenario& scenario, std::span<const std::vector<int>> prompts,
               Var delta, std::span<const AffineParams> views, AttackMode mode) {
  if (views.size() != scenario.frames.size()) {
    throw InvalidArgument("loss_image: need one view per frame");
  }
  Graph& g = delta.graph();
  std::vector<Var> frames;
  frames.reserve(views.size());
  for (std::size_t i = 0; i < views.size(); ++i) {
    frames.push_back(perturb(g, warp(scenario.frames[i], views[i]), delta));
  }
  return sum_over_prompts(model, model.encode_frames(frames), prompts, scenario, mode);
}

Var loss_scene(const BoundVlm& model, const Scenario& scenario, std::span<const Frame> pivotal,
               std::span<const std::vector<int>> prompts, Var delta, AttackMode mode) {
  if (pivotal.empty()) throw InvalidArgument("loss_scene: empty pivotal set");
  Graph& g = delta.graph();
  std::vector<Var> frames;
  for (const Frame& f : pivotal) frames.push_back(perturb(g, f, delta));
  return sum_over_prompts(model, model.encode_frames(frames), prompts, scenario, mode);
}

Var loss_attack(Var image, Var scene, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("loss_attack: lambda must lie in [0, 1]");
  return ops::add(ops::scale(image, 1.0 - lambda), ops::scale(scene, lambda));
}

std::vector<std::string> attack_prompts(const PromptLibrary& library, const Scenario& scenario,
                                        std::size_t width) {
  const LibraryEntry* e = library.find_seed(scenario.prompt);
  if (e == nullptr) {
    throw InvalidArgument("scenario " + scenario.id + ": prompt '" + scenario.prompt + "' not in library");
  }
  auto texts = select(library, e->seed_id);
  if (width > texts.size()) {
    throw InvalidArgument("prompt width " + std::to_string(width) + " exceeds the " +
                          std::to_string(texts.size()) + " texts available for seed " + e->seed_id);
  }
  texts.resize(width);
  return texts;
}

namespace {

struct Objective {
  const Scenario* scenario = nullptr;
  std::vector<std::vector<int>> prompts;
  std::vector<int> seed_ids;
  std::vector<Frame> pivotal;
};

std::vector<Frame> pick_pivotal(const ToyVlm& model, const AttackConfig& cfg, std::span<const int> seed_ids,
                                const FrameSequence& frames) {
  if (!cfg.use_pivotal) return frames.frames;
  const std::size_t k = std::min(cfg.pivotal_frames, frames.size());
  return select_pivotal_frames(frames, k, model, seed_ids).frames;
}

Objective make_objective(const Scenario& s, const PromptLibrary& library, const ToyVlm& model,
                         const AttackConfig& cfg) {
  s.validate(model.config().num_classes);
  Objective o;
  o.scenario = &s;
  for (const auto& text : attack_prompts(library, s, cfg.prompt_width)) o.prompts.push_back(model.encode_text(text));
  o.seed_ids = model.encode_text(s.prompt);
  o.pivotal = pick_pivotal(model, cfg, o.seed_ids, s.frames);
  return o;
}

std::vector<AffineParams> draw_views(std::size_t n, const AttackConfig& cfg, Rng& rng) {
  std::vector<AffineParams> views(n);
  if (cfg.use_transforms) {
    for (auto& v : views) v = sample_affine(rng, cfg.ranges);
  }
  return views;
}

struct StepTerms {
  Var image, scene, attack;
};

StepTerms build_terms(const BoundVlm& bound, std::span<const Objective> objectives, Var delta,
                      const AttackConfig& cfg, Rng& rng) {
  Var image, scene;
  for (const Objective& o : objectives) {
    const Scenario& s = *o.scenario;
    Var img;
    for (int t = 0; t < cfg.transforms_per_step; ++t) {
      auto views = draw_views(s.frames.size(), cfg, rng);
      Var term = loss_image(bound, s, o.prompts, delta, views, cfg.mode);
      img = img.valid() ? ops::add(img, term) : term;
    }
    if (cfg.transforms_per_step > 1) img = ops::scale(img, 1.0 / cfg.transforms_per_step);
    Var scn = loss_scene(bound, s, o.pivotal, o.prompts, delta, cfg.mode);
    image = image.valid() ? ops::add(image, img) : img;
    scene = scene.valid() ? ops::add(scene, scn) : scn;
  }
  return {image, scene, loss_attack(image, scene, cfg.lambda)};
}

void sign_step(Tensor& delta, const Tensor& grad, double alpha, double epsilon) {
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double g = grad[i];
    const double s = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
    delta[i] = std::clamp(delta[i] - alpha * s, -epsilon, epsilon);
  }
}

void record_step(AttackTrace& trace, double image, double scene, double attack, const Tensor& delta) {
  AttackStep st{image, scene, attack, delta.max_abs(), attack};
  if (!trace.steps.empty() && trace.steps.back().best_loss <= attack) {
    st.best_loss = trace.steps.back().best_loss;
  } else {
    trace.best_step = trace.steps.size();
  }
  trace.steps.push_back(st);
}

AttackResult run_advlm(std::span<const Scenario> scenarios, const PromptLibrary& library, const ToyVlm& model,
                       const AttackConfig& cfg, Rng& rng) {
  cfg.validate();
  if (scenarios.empty()) throw InvalidArgument("advlm_attack: no scenarios");
  const Shape shape = scenarios[0].frames.frame_shape();
  std::vector<Objective> objectives;
  for (const Scenario& s : scenarios) {
    if (s.frames.frame_shape() != shape) throw ShapeError("advlm_attack: scenarios differ in frame shape");
    objectives.push_back(make_objective(s, library, model, cfg));
  }
  AttackResult result{Perturbation::zeros(shape, cfg.epsilon), {}};
  Tensor& delta = result.perturbation.delta;
  const Scenario& first = scenarios[0];
  result.trace.initial_target_prob = target_probability(model, first.frames, first.prompt, first.target);
  const double alpha = cfg.alpha();
  for (int step = 0; step < cfg.steps; ++step) {
    if (cfg.reselect_pivotal && cfg.use_pivotal && step > 0) {
      for (Objective& o : objectives) {
        o.pivotal = pick_pivotal(model, cfg, o.seed_ids,
                                 apply(o.scenario->frames, result.perturbation));
      }
    }
    try {
      Graph g;
      BoundVlm bound = BoundVlm::bind(g, model, false);
      Var d = g.leaf(delta, true, "delta");
      StepTerms terms = build_terms(bound, objectives, d, cfg, rng);
      g.backward(terms.attack);
      const double li = terms.image.value()[0], ls = terms.scene.value()[0], la = terms.attack.value()[0];
      sign_step(delta, g.grad(d), alpha, cfg.epsilon);
      record_step(result.trace, li, ls, la, delta);
    } catch (const NumericError& e) {
      throw NumericError("advlm_attack: step " + std::to_string(step) + ": " + e.what());
    }
  }
  result.trace.final_target_prob =
      target_probability(model, apply(first.frames, result.perturbation), first.prompt, first.target);
  return result;
}

// Gradient of the single-prompt loss on the un-warped sequence.
Tensor single_prompt_grad(const Scenario& s, std::span<const int> ids, const ToyVlm& model,
                          const Tensor& delta, AttackMode mode, double* loss_out) {
  Graph g;
  BoundVlm bound = BoundVlm::bind(g, model, false);
  Var d = g.leaf(delta, true, "delta");
  std::vector<Var> frames;
  for (const Frame& f : s.frames.frames) frames.push_back(perturb(g, f, d));
  Var loss = response_loss(bound.respond(bound.encode_prompt(ids), bound.encode_frames(frames)), s, mode);
  g.backward(loss);
  if (loss_out) *loss_out = loss.value()[0];
  return g.grad(d);
}

}  // namespace

LossValues evaluate_losses(const Scenario& scenario, const PromptLibrary& library, const Tensor& delta,
                           const ToyVlm& model, const AttackConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Objective> objectives{make_objective(scenario, library, model, cfg)};
  Graph g;
  BoundVlm bound = BoundVlm::bind(g, model, false);
  Var d = g.leaf(delta, false, "delta");
  StepTerms t = build_terms(bound, objectives, d, cfg, rng);
  return {t.image.value()[0], t.scene.value()[0], t.attack.value()[0]};
}

AttackResult advlm_attack(const Scenario& scenario, const PromptLibrary& library, const ToyVlm& model,
                          const AttackConfig& cfg, Rng& rng) {
  return run_advlm(std::span<const Scenario>(&scenario, 1), library, model, cfg, rng);
}

AttackResult advlm_attack_universal(std::span<const Scenario> scenarios, const PromptLibrary& library,
                                    const ToyVlm& model, const AttackConfig& cfg, Rng& rng) {
  return run_advlm(scenarios, library, model, cfg, rng);
}

Perturbation fgsm_attack(const Scenario& scenario, std::string_view prompt, const ToyVlm& model,
                         const AttackConfig& cfg) {
  cfg.validate();
  scenario.validate(model.config().num_classes);
  Perturbation p = Perturbation::zeros(scenario.frames.frame_shape(), cfg.epsilon);
  const auto ids = model.encode_text(prompt);
  const Tensor grad = single_prompt_grad(scenario, ids, model, p.delta, cfg.mode, nullptr);
  sign_step(p.delta, grad, cfg.epsilon, cfg.epsilon);
  return p;
}

AttackResult pgd_attack(const Scenario& scenario, std::string_view prompt, const ToyVlm& model,
                        const AttackConfig& cfg, Rng& rng) {
  cfg.validate();
  scenario.validate(model.config().num_classes);
  (void)rng;  // no random start or transforms
  AttackResult result{Perturbation::zeros(scenario.frames.frame_shape(), cfg.epsilon), {}};
  Tensor& delta = result.perturbation.delta;
  const auto ids = model.encode_text(prompt);
  result.trace.initial_target_prob = target_probability(model, scenario.frames, prompt, scenario.target);
  const double alpha = cfg.alpha();
  for (int step = 0; step < cfg.steps; ++step) {
    double loss = 0.0;
    try {
      const Tensor grad = single_prompt_grad(scenario, ids, model, delta, cfg.mode, &loss);
      sign_step(delta, grad, alpha, cfg.epsilon);
    } catch (const NumericError& e) {
      throw NumericError("pgd_attack: step " + std::to_string(step) + ": " + e.what());
    }
    record_step(result.trace, loss, 0.0, loss, delta);
  }
  result.trace.final_target_prob =
      target_probability(model, apply(scenario.frames, result.perturbation), prompt, scenario.target);
  return result;
}

double target_probability(const ToyVlm& model, const FrameSequence& seq, std::string_view prompt,
                          int target_class) {
  return std::exp(forward(model, seq, prompt)[static_cast<std::size_t>(target_class)]);
}

void AttackTrace::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace " + path);
  out << std::setprecision(17) << "step,l_image,l_scene,l_attack,linf,best_loss\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    out << i << ',' << s.l_image << ',' << s.l_scene << ',' << s.l_attack << ',' << s.linf << ','
        << s.best_loss << '\n';
  }
}

nlohmann::json to_json(const AttackConfig& cfg) {
  return {{"epsilon", cfg.epsilon},
          {"steps", cfg.steps},
          {"alpha", cfg.alpha()},
          {"lambda", cfg.lambda},
          {"pivotal_frames", cfg.pivotal_frames},
          {"prompt_width", cfg.prompt_width},
          {"mode", to_string(cfg.mode)},
          {"seed", cfg.seed},
          {"transforms_per_step", cfg.transforms_per_step},
          {"use_transforms", cfg.use_transforms},
          {"use_pivotal", cfg.use_pivotal},
          {"reselect_pivotal", cfg.reselect_pivotal},
          {"max_rotation", cfg.ranges.max_rotation},
          {"max_translation", cfg.ranges.max_translation},
          {"min_scale", cfg.ranges.min_scale},
          {"max_scale", cfg.ranges.max_scale}};
}

void save_perturbation(const std::string& stem, const Perturbation& p, const PerturbationMeta& meta) {
  save_tensor(stem + ".advt", p.delta);
  nlohmann::json j = {{"epsilon", p.epsilon},
                      {"steps", meta.config.steps},
                      {"alpha", meta.config.alpha()},
                      {"lambda", meta.config.lambda},
                      {"seed", meta.config.seed},
                      {"scenario_id", meta.scenario_id},
                      {"mode", to_string(meta.config.mode)},
                      {"target", meta.target},
                      {"method", meta.method}};
  std::ofstream out(stem + ".json");
  if (!out) throw IoError("cannot write " + stem + ".json");
  out << j.dump(2) << '\n';
}

Perturbation load_perturbation(const std::string& stem) {
  std::ifstream in(stem + ".json");
  if (!in) throw IoError("cannot read " + stem + ".json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(stem + ".json: " + e.what());
  }
  Perturbation p{load_tensor(stem + ".advt"), j.at("epsilon").get<double>()};
  if (p.delta.max_abs() > p.epsilon + 1e-9) throw IoError(stem + ": perturbation exceeds its epsilon");
  return p;
}

}  // namespace advlm

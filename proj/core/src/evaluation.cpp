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

#include "advlm/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "advlm/error.hpp"
#include "advlm/similarity.hpp"
#include "advlm/variant_generator.hpp"

namespace advlm {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> held_out_paraphrases(std::string_view seed, std::size_t k) {
  if (k == 0) return {};
  RulesGenerator gen(SynonymPartition::kHeldOut);
  const std::string norm = normalize_text(seed);
  Rng rng(fnv1a64(norm), 0x686f6c64);
  auto out = gen.generate(norm, k, rng);
  if (out.size() < k) {
    throw InvalidArgument("only " + std::to_string(out.size()) + " held-out paraphrases available for '" +
                          norm + "', " + std::to_string(k) + " requested");
  }
  return out;
}

std::vector<std::string> evaluation_prompts(const Scenario& scenario, std::size_t paraphrases) {
  if (paraphrases == 0) return {scenario.prompt};
  return held_out_paraphrases(scenario.prompt, paraphrases);
}

double prompt_accuracy(const ToyVlm& model, std::span<const Frame> frames,
                       std::span<const std::string> prompts, int label) {
  if (prompts.empty()) throw InvalidArgument("prompt_accuracy: no prompts");
  std::size_t hits = 0;
  for (const auto& p : prompts) {
    const auto ids = model.encode_text(p);
    if (static_cast<int>(argmax(forward(model, frames, ids))) == label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(prompts.size());
}

double task_score(const ToyVlm& model, std::span<const Scenario> scenarios, std::size_t paraphrases) {
  if (scenarios.empty()) throw InvalidArgument("task_score: empty scenario set");
  double total = 0.0;
  for (const Scenario& s : scenarios) {
    const auto prompts = evaluation_prompts(s, paraphrases);
    total += prompt_accuracy(model, s.frames.frames, prompts, s.label);
  }
  return 100.0 * total / static_cast<double>(scenarios.size());
}

std::string mode_name(std::size_t paraphrases) {
  return paraphrases == 0 ? "seed-only" : "paraphrase-" + std::to_string(paraphrases);
}

std::vector<AffineParams> evaluation_views(const Scenario& scenario, const EvalOptions& options,
                                           const AffineRanges& ranges) {
  std::vector<AffineParams> views(scenario.frames.size());
  if (!options.warped_views) return views;
  Rng rng(options.view_seed ^ fnv1a64(scenario.id), 0x76696577);
  for (auto& v : views) v = sample_affine(rng, ranges);
  return views;
}

std::vector<Frame> evaluation_frames(const Scenario& scenario, const Perturbation* delta,
                                     const EvalOptions& options, const AffineRanges& ranges) {
  const auto views = evaluation_views(scenario, options, ranges);
  std::vector<Frame> frames;
  frames.reserve(views.size());
  for (std::size_t i = 0; i < views.size(); ++i) frames.push_back(warp(scenario.frames[i], views[i]));
  if (delta == nullptr) return frames;
  return apply(FrameSequence(scenario.id, std::move(frames)), *delta).frames;
}

const MethodScores& EvalReport::method(std::string_view name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw InvalidArgument("report has no method '" + std::string(name) + "'");
}

namespace {

// Reference numbers printed next to every desk-scale report for context only.
nlohmann::json reference_values() {
  return {{"textual_variability_drop",
           {{"seed-only", {{"advlm", 16.97}, {"pgd", 14.06}}},
            {"paraphrase-3", {{"advlm", 11.01}, {"pgd", 7.65}}},
            {"paraphrase-5", {{"advlm", 6.62}, {"pgd", 1.67}}}}},
          {"attention_similarity",
           {{"before", {{"ssim", 88.70}, {"pcc", 88.27}}}, {"after", {{"ssim", 26.74}, {"pcc", 14.58}}}}}};
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : methods) {
    ms.push_back({{"method", m.method},
                  {"clean", m.clean},
                  {"attacked", m.attacked},
                  {"drop", m.drop},
                  {"mean_linf", m.mean_linf}});
  }
  j["methods"] = ms;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    rs.push_back({{"scenario_id", r.scenario_id},
                  {"method", r.method},
                  {"clean", r.clean},
                  {"attacked", r.attacked},
                  {"linf", r.linf},
                  {"target_prob", r.target_prob}});
  }
  j["scenarios"] = rs;
  j["extra"] = extra;
  j["reference"] = reference_values();
  return j;
}

void EvalReport::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.json");
    if (!out) throw IoError("cannot write report in " + dir);
    out << to_json().dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "summary.csv");
    out << "method,mode,clean,attacked,drop,mean_linf\n";
    for (const auto& m : methods) {
      for (const auto& [mode, clean] : m.clean) {
        out << m.method << ',' << mode << ',' << fmt(clean) << ',' << fmt(m.attacked.at(mode)) << ','
            << fmt(m.drop.at(mode)) << ',' << fmt(m.mean_linf) << '\n';
      }
    }
  }
  std::ofstream out(fs::path(dir) / "scenarios.csv");
  if (!out) throw IoError("cannot write scenarios.csv in " + dir);
  out << "scenario_id,method,mode,clean,attacked,linf,target_prob\n";
  for (const auto& r : rows) {
    for (const auto& [mode, clean] : r.clean) {
      out << r.scenario_id << ',' << r.method << ',' << mode << ',' << fmt(clean) << ','
          << fmt(r.attacked.at(mode)) << ',' << fmt(r.linf) << ',' << fmt(r.target_prob) << '\n';
    }
  }
}

AttackResult craft_attack(std::string_view method, const Scenario& scenario, const PromptLibrary& library,
                          const ToyVlm& model, const AttackConfig& cfg) {
  Rng rng(cfg.seed ^ fnv1a64(scenario.id), fnv1a64(method));
  if (method == "advlm") return advlm_attack(scenario, library, model, cfg, rng);
  if (method == "pgd") return pgd_attack(scenario, scenario.prompt, model, cfg, rng);
  if (method == "fgsm") return {fgsm_attack(scenario, scenario.prompt, model, cfg), {}};
  if (method == "none") {
    cfg.validate();
    return {Perturbation::zeros(scenario.frames.frame_shape(), cfg.epsilon), {}};
  }
  throw InvalidArgument("unknown attack method '" + std::string(method) + "' (advlm, pgd, fgsm, none)");
}

Perturbation craft(std::string_view method, const Scenario& scenario, const PromptLibrary& library,
                   const ToyVlm& model, const AttackConfig& cfg) {
  return craft_attack(method, scenario, library, model, cfg).perturbation;
}

EvalReport evaluate_methods(std::span<const std::string> methods, std::span<const Scenario> scenarios,
                            const PromptLibrary& library, const ToyVlm& source, const ToyVlm& victim,
                            const AttackConfig& cfg, const EvalOptions& options) {
  if (scenarios.empty()) throw InvalidArgument("evaluate_methods: empty scenario set");
  if (methods.empty()) throw InvalidArgument("evaluate_methods: no methods");
  cfg.validate();
  const std::size_t n = scenarios.size();

  // Clean scores do not depend on the method.
  std::vector<std::map<std::string, double>> clean(n);
  std::vector<std::vector<std::vector<std::string>>> prompts(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k : options.paraphrase_modes) prompts[i].push_back(evaluation_prompts(scenarios[i], k));
  }
  parallel_for(n, options.jobs, [&](std::size_t i) {
    const auto frames = evaluation_frames(scenarios[i], nullptr, options, cfg.ranges);
    for (std::size_t m = 0; m < options.paraphrase_modes.size(); ++m) {
      clean[i][mode_name(options.paraphrase_modes[m])] =
          100.0 * prompt_accuracy(victim, frames, prompts[i][m], scenarios[i].label);
    }
  });

  EvalReport report;
  report.config = {{"attack", to_json(cfg)},
                   {"methods", methods},
                   {"paraphrase_modes", options.paraphrase_modes},
                   {"warped_views", options.warped_views},
                   {"view_seed", options.view_seed},
                   {"source_seed", source.seed()},
                   {"victim_seed", victim.seed()},
                   {"library_backend", library.backend},
                   {"scenarios", n}};
  for (const std::string& method : methods) {
    std::vector<ScenarioRow> rows(n);
    parallel_for(n, options.jobs, [&](std::size_t i) {
      const Scenario& s = scenarios[i];
      const Perturbation delta = craft(method, s, library, source, cfg);
      const auto frames = evaluation_frames(s, &delta, options, cfg.ranges);
      ScenarioRow& row = rows[i];
      row.scenario_id = s.id;
      row.method = method;
      row.clean = clean[i];
      for (std::size_t m = 0; m < options.paraphrase_modes.size(); ++m) {
        row.attacked[mode_name(options.paraphrase_modes[m])] =
            100.0 * prompt_accuracy(victim, frames, prompts[i][m], s.label);
      }
      row.linf = delta.delta.max_abs();
      row.target_prob = target_probability(victim, apply(s.frames, delta), s.prompt, s.target);
    });
    MethodScores scores;
    scores.method = method;
    for (std::size_t k : options.paraphrase_modes) {
      const std::string mode = mode_name(k);
      double c = 0.0, a = 0.0;
      for (const auto& r : rows) {
        c += r.clean.at(mode);
        a += r.attacked.at(mode);
      }
      scores.clean[mode] = c / static_cast<double>(n);
      scores.attacked[mode] = a / static_cast<double>(n);
      scores.drop[mode] = scores.clean[mode] - scores.attacked[mode];
    }
    for (const auto& r : rows) scores.mean_linf += r.linf;
    scores.mean_linf /= static_cast<double>(n);
    report.methods.push_back(std::move(scores));
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }
  return report;
}

EvalReport run_attack_eval(std::span<const std::string> methods, std::span<const Scenario> scenarios,
                           const PromptLibrary& library, const ToyVlm& model, const AttackConfig& cfg,
                           const EvalOptions& options) {
  return evaluate_methods(methods, scenarios, library, model, model, cfg, options);
}

EvalReport transfer_eval(const ToyVlm& source, const ToyVlm& victim, std::span<const std::string> methods,
                         std::span<const Scenario> scenarios, const PromptLibrary& source_library,
                         const AttackConfig& cfg, const EvalOptions& options) {
  if (&source != &victim && source.seed() == victim.seed()) {
    throw InvalidArgument("transfer_eval: source and victim share seed " + std::to_string(source.seed()) +
                          "; transfer needs independently trained models");
  }
  EvalReport r = evaluate_methods(methods, scenarios, source_library, source, victim, cfg, options);
  r.extra["transfer"] = &source != &victim;
  return r;
}

nlohmann::json AttentionTable::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    rs.push_back({{"scenario_id", r.scenario_id},
                  {"ssim_before", r.ssim_before},
                  {"pcc_before", r.pcc_before},
                  {"sim_before", r.sim_before},
                  {"ssim_after", r.ssim_after},
                  {"pcc_after", r.pcc_after},
                  {"sim_after", r.sim_after},
                  {"view_sim_before", r.view_sim_before},
                  {"view_sim_after", r.view_sim_after}});
  }
  return {{"rows", rs},
          {"ssim_before", ssim_before},
          {"pcc_before", pcc_before},
          {"sim_before", sim_before},
          {"ssim_after", ssim_after},
          {"pcc_after", pcc_after},
          {"sim_after", sim_after},
          {"fraction_decreased", fraction_decreased},
          {"reference", reference_values()["attention_similarity"]}};
}

namespace {

struct PairStats {
  double ssim = 0, pcc = 0;
  double sim() const { return 0.5 * (ssim + pcc); }
};

// Mean pairwise SSIM and PCC within each group, averaged over groups.
PairStats mean_pairwise(const std::vector<std::vector<AttentionMap>>& groups) {
  PairStats out;
  std::size_t pairs = 0;
  for (const auto& g : groups) {
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = a + 1; b < g.size(); ++b) {
        out.ssim += ssim(g[a], g[b]);
        out.pcc += pcc(g[a], g[b]);
        ++pairs;
      }
    }
  }
  if (pairs > 0) {
    out.ssim /= static_cast<double>(pairs);
    out.pcc /= static_cast<double>(pairs);
  }
  return out;
}

}  // namespace

AttentionTable attention_divergence(const ToyVlm& model, std::span<const Scenario> scenarios,
                                    std::span<const Perturbation> deltas, const PromptLibrary& library,
                                    const AttackConfig& cfg, std::size_t views, int jobs) {
  if (scenarios.size() != deltas.size()) {
    throw InvalidArgument("attention_divergence: " + std::to_string(scenarios.size()) + " scenarios but " +
                          std::to_string(deltas.size()) + " perturbations");
  }
  if (scenarios.empty()) throw InvalidArgument("attention_divergence: empty scenario set");
  AttentionTable table;
  table.rows.resize(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
    const Scenario& s = scenarios[i];
    const LibraryEntry* e = library.find_seed(s.prompt);
    if (e == nullptr) throw InvalidArgument("scenario " + s.id + ": prompt not in library");
    std::vector<std::vector<int>> prompt_ids;
    for (const auto& t : select(library, e->seed_id)) prompt_ids.push_back(model.encode_text(t));
    const auto seed_ids = model.encode_text(s.prompt);
    std::vector<AffineParams> view_params{AffineParams::identity()};
    Rng rng(cfg.seed ^ fnv1a64(s.id), 0x61747476);
    for (std::size_t v = 1; v < views; ++v) view_params.push_back(sample_affine(rng, cfg.ranges));
    const FrameSequence attacked = apply(s.frames, deltas[i]);

    auto prompt_groups = [&](const FrameSequence& seq) {
      std::vector<std::vector<AttentionMap>> groups;
      for (const Frame& f : seq.frames) {
        auto& g = groups.emplace_back();
        for (const auto& ids : prompt_ids) g.push_back(attention_map(model, f, ids));
      }
      return groups;
    };
    // Views are warped before delta is added, as at evaluation time.
    auto view_groups = [&](const Perturbation* delta) {
      std::vector<std::vector<AttentionMap>> groups;
      for (const Frame& f : s.frames.frames) {
        auto& g = groups.emplace_back();
        for (const auto& vp : view_params) {
          Frame w = warp(f, vp);
          if (delta != nullptr) w = apply(FrameSequence(s.id, {w}), *delta).frames[0];
          g.push_back(attention_map(model, w, seed_ids));
        }
      }
      return groups;
    };
    const PairStats before = mean_pairwise(prompt_groups(s.frames));
    const PairStats after = mean_pairwise(prompt_groups(attacked));
    AttentionRow& row = table.rows[i];
    row.scenario_id = s.id;
    row.ssim_before = before.ssim;
    row.pcc_before = before.pcc;
    row.sim_before = before.sim();
    row.ssim_after = after.ssim;
    row.pcc_after = after.pcc;
    row.sim_after = after.sim();
    if (views > 1) {
      row.view_sim_before = mean_pairwise(view_groups(nullptr)).sim();
      row.view_sim_after = mean_pairwise(view_groups(&deltas[i])).sim();
    }
  });
  std::size_t decreased = 0;
  for (const auto& r : table.rows) {
    table.ssim_before += r.ssim_before;
    table.pcc_before += r.pcc_before;
    table.ssim_after += r.ssim_after;
    table.pcc_after += r.pcc_after;
    table.sim_before += r.sim_before;
    table.sim_after += r.sim_after;
    if (r.sim_after < r.sim_before) ++decreased;
  }
  const auto n = static_cast<double>(table.rows.size());
  table.ssim_before /= n;
  table.pcc_before /= n;
  table.ssim_after /= n;
  table.pcc_after /= n;
  table.sim_before /= n;
  table.sim_after /= n;
  table.fraction_decreased = static_cast<double>(decreased) / n;
  return table;
}

AblationAxis parse_ablation_axis(std::string_view name) {
  if (name == "steps") return AblationAxis::kSteps;
  if (name == "budget") return AblationAxis::kBudget;
  if (name == "prompts") return AblationAxis::kPrompts;
  if (name == "lambda") return AblationAxis::kLambda;
  if (name == "frames") return AblationAxis::kFrames;
  if (name == "sae") return AblationAxis::kSae;
  throw InvalidArgument("unknown ablation axis '" + std::string(name) +
                        "' (steps, budget, prompts, lambda, frames, sae)");
}

std::string to_string(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kSteps: return "steps";
    case AblationAxis::kBudget: return "budget";
    case AblationAxis::kPrompts: return "prompts";
    case AblationAxis::kLambda: return "lambda";
    case AblationAxis::kFrames: return "frames";
    case AblationAxis::kSae: return "sae";
  }
  return "unknown";
}

std::vector<double> default_ablation_values(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kSteps: return {3, 5, 10, 20, 50, 100};
    case AblationAxis::kBudget: return {0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
    case AblationAxis::kPrompts: return {1, 2, 3, 4, 5};
    case AblationAxis::kLambda: return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    case AblationAxis::kFrames: return {1, 2, 4, 6, 8, 12, 16};
    case AblationAxis::kSae: return {0, 1};
  }
  return {};
}

namespace {

std::size_t positive_count(double value, const char* what) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw InvalidArgument(std::string(what) + " must be a positive integer, got " + fmt(value));
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

AttackConfig ablation_config(AblationAxis axis, double value, const AttackConfig& base) {
  AttackConfig cfg = base;
  switch (axis) {
    case AblationAxis::kSteps: cfg.steps = static_cast<int>(positive_count(value, "steps")); break;
    case AblationAxis::kBudget: cfg.epsilon = value; break;
    case AblationAxis::kPrompts: cfg.prompt_width = positive_count(value, "prompt count"); break;
    case AblationAxis::kLambda: cfg.lambda = value; break;
    case AblationAxis::kFrames: cfg.pivotal_frames = positive_count(value, "pivotal frame count"); break;
    case AblationAxis::kSae:
      if (value != 0.0 && value != 1.0) throw InvalidArgument("sae axis takes 0 (off) or 1 (on)");
      if (value == 0.0) {
        cfg.use_transforms = false;
        cfg.use_pivotal = false;
        cfg.lambda = 0.0;
      }
      break;
  }
  cfg.validate();
  return cfg;
}

std::vector<AblationRow> ablation_sweep(AblationAxis axis, std::span<const double> values,
                                        std::span<const Scenario> scenarios, const PromptLibrary& library,
                                        const ToyVlm& model, const AttackConfig& base,
                                        const EvalOptions& options) {
  EvalOptions opts = options;
  opts.paraphrase_modes = {0};
  const std::string mode = mode_name(0);
  const std::vector<std::string> methods{"advlm"};
  std::vector<AblationRow> rows;
  for (double v : values) {
    const AttackConfig cfg = ablation_config(axis, v, base);
    const EvalReport r = run_attack_eval(methods, scenarios, library, model, cfg, opts);
    const MethodScores& m = r.method("advlm");
    rows.push_back({v, m.clean.at(mode), m.attacked.at(mode), m.drop.at(mode)});
  }
  return rows;
}

void write_ablation_csv(const std::string& path, std::span<const AblationRow> rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "value,clean,attacked,drop\n";
  for (const auto& r : rows) {
    out << fmt(r.value) << ',' << fmt(r.clean) << ',' << fmt(r.attacked) << ',' << fmt(r.drop) << '\n';
  }
}

}  // namespace advlm

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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "advlm/attack.hpp"
#include "advlm/cli.hpp"
#include "advlm/evaluation.hpp"
#include "advlm/grad_check.hpp"
#include "advlm/pipeline.hpp"
#include "advlm/pivotal.hpp"
#include "advlm/similarity.hpp"
#include "test_util.hpp"

namespace advlm {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

constexpr int kSeeds = 5;

// Seeded workbenches shared by the benchmark-level criteria. Building one
// trains a victim, so they are created lazily and kept.
class Workbenches {
 public:
  const Workbench& get(int seed) {
    auto it = cache_.find(seed);
    if (it == cache_.end()) {
      const auto t0 = Clock::now();
      it = cache_.emplace(seed, std::make_unique<Workbench>(prepare_workbench(static_cast<std::uint64_t>(seed))))
               .first;
      build_seconds_ += seconds_since(t0);
    }
    return *it->second;
  }
  double build_seconds() const { return build_seconds_; }

 private:
  std::map<int, std::unique_ptr<Workbench>> cache_;
  double build_seconds_ = 0.0;
};

Workbenches& workbenches() {
  static Workbenches w;
  return w;
}

AttackConfig seeded_config(int seed) {
  AttackConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(seed);
  return cfg;
}

// 1. Autodiff against central differences on the full attack loss.
Outcome gradient_fidelity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int seed = 1; seed <= 10; ++seed) {
    ToyVlmConfig mc;
    mc.height = 8;
    mc.width = 8;
    const ToyVlm model = ToyVlm::initialize(mc, testing::tiny_vocab(), static_cast<std::uint64_t>(seed));
    Rng rng(static_cast<std::uint64_t>(seed), 0xfd);
    std::vector<FrameSequence> probes{testing::random_sequence(rng, 2), testing::random_sequence(rng, 2)};
    const PromptLibrary library = testing::tiny_library(model, probes, 2);
    const Scenario s = testing::tiny_scenario(rng, 2, 8, benchmark_seed_prompts()[static_cast<std::size_t>(seed) % 8].text);
    std::vector<std::vector<int>> prompts;
    for (const auto& t : attack_prompts(library, s, 2)) prompts.push_back(model.encode_text(t));
    const auto pivotal = select_pivotal_frames(s.frames, 1, model, model.encode_text(s.prompt)).frames;
    const std::vector<AffineParams> views{sample_affine(rng), sample_affine(rng)};
    const ScalarFn f = [&](Graph& g, Var delta) {
      BoundVlm b = BoundVlm::bind(g, model, false);
      return loss_attack(loss_image(b, s, prompts, delta, views, AttackMode::kTargeted),
                         loss_scene(b, s, pivotal, prompts, delta, AttackMode::kTargeted), 0.4);
    };
    const Tensor delta = testing::random_tensor({3, 8, 8}, rng, -0.02, 0.02);
    worst = std::max(worst, grad_check(f, delta, 1e-6));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && secs < 30.0,
          "max rel err " + fmt(worst, 3) + " over 10 seeds (limit 1e-3), " + fmt(secs, 3) + " s (limit 30 s)"};
}

// 2. Budget, pixel range and uniformity on every attacked scenario.
Outcome threat_model_invariants() {
  const Workbench& wb = workbenches().get(1);
  const AttackConfig cfg = seeded_config(1);
  const auto& scenarios = wb.bench.scenarios;
  std::vector<Perturbation> deltas(scenarios.size());
  parallel_for(scenarios.size(), 1, [&](std::size_t i) {
    deltas[i] = craft("advlm", scenarios[i], wb.library, wb.victim, cfg);
  });
  std::size_t violations = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Perturbation& p = deltas[i];
    if (p.delta.max_abs() > 0.1 + 1e-9) ++violations;
    const FrameSequence& clean = scenarios[i].frames;
    const FrameSequence attacked = apply(clean, p);
    for (std::size_t k = 0; k < attacked.size(); ++k) {
      const auto& px = attacked[k].pixels();
      const auto& c = clean[k].pixels();
      for (std::size_t j = 0; j < px.size(); ++j) {
        if (!(px[j] >= 0.0 && px[j] <= 1.0)) ++violations;
        // Where no clamp engaged, the applied shift must equal delta exactly.
        const double want = c[j] + p.delta[j];
        if (want > 0.0 && want < 1.0 && px[j] != want) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(scenarios.size()) + " scenarios attacked, " + std::to_string(violations) +
                               " violations"};
}

// 3. Each greedy pick against an independent exhaustive scan.
Outcome greedy_oracle() {
  std::size_t steps = 0, bad = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(static_cast<std::uint64_t>(i), 0x6f7261);
    const std::size_t n = 1 + rng.uniform_int(8);
    const std::size_t k = 1 + rng.uniform_int(static_cast<std::uint32_t>(std::min<std::size_t>(n, 4)));
    const ToyVlm model = testing::tiny_model(static_cast<std::uint64_t>(100 + i));
    const FrameSequence seq = testing::random_sequence(rng, n);
    const auto ids = model.encode_text(benchmark_seed_prompts()[static_cast<std::size_t>(i) % 8].text);
    const auto maps = sequence_attention(model, seq, ids);
    const auto sel = select_pivotal(maps, k);
    if (sel.picks.empty() || sel.picks[0] != 0 || sel.picks.size() != k) {
      ++bad;
      continue;
    }
    std::vector<bool> taken(n, false);
    taken[0] = true;
    std::vector<AttentionMap> chosen{maps[0]};
    for (std::size_t step = 1; step < k; ++step, ++steps) {
      const AttentionMap mean = mean_map(chosen);
      std::size_t best = n;
      double best_sim = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j]) continue;
        const double v = sim(maps[j], mean);
        if (v < best_sim) {
          best_sim = v;
          best = j;
        }
      }
      if (sel.picks[step] != best) ++bad;
      taken[best] = true;
      chosen.push_back(maps[best]);
    }
  }
  return {bad == 0, "50 sequences, " + std::to_string(steps) + " greedy steps, " + std::to_string(bad) + " mismatches"};
}

// 4. Similarity and prompt-scoring identities.
Outcome metric_identities() {
  const EmbeddingTable& table = default_embeddings();
  const auto& words = table.words();
  std::size_t failures = 0;
  double worst = 0.0;
  auto expect = [&](double got, double want) {
    const double err = std::abs(got - want);
    worst = std::max(worst, err);
    if (!(err <= 1e-9)) ++failures;
  };
  for (int i = 0; i < 100; ++i) {
    Rng rng(static_cast<std::uint64_t>(i), 0x6d6574);
    const std::size_t h = 4 + rng.uniform_int(8), w = 4 + rng.uniform_int(8);
    const Tensor x = testing::random_tensor({h, w}, rng, 0.0, 1.0);
    const AttentionMap a(x);
    expect(ssim(a, a), 1.0);
    expect(pcc(a, a), 1.0);
    const double scale = rng.uniform(0.1, 3.0), shift = rng.uniform(-2.0, 2.0);
    std::vector<double> pos(x.size()), neg(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      pos[j] = scale * x[j] + shift;
      neg[j] = -scale * x[j] + shift;
    }
    expect(pcc(x.data(), pos), 1.0);
    expect(pcc(x.data(), neg), -1.0);
    std::string text;
    const std::size_t len = 1 + rng.uniform_int(6);
    for (std::size_t j = 0; j < len; ++j) text += (j ? " " : "") + words[rng.uniform_int(static_cast<std::uint32_t>(words.size()))];
    expect(diversity(text, text, table), 0.0);
    const double se = rng.uniform(0.0, std::log(5.0)), d = rng.uniform(0.0, 2.0), beta = rng.uniform(0.0, 2.0);
    const double base = penalty(se, d, beta);
    if (penalty(se + rng.uniform(0.0, 1.0), d, beta) < base) ++failures;
    if (penalty(se, d + rng.uniform(0.0, 1.0), beta) < base) ++failures;
    expect(base, se + beta * d);
  }
  return {failures == 0, "100 fixtures, max abs err " + fmt(worst, 3) + ", " + std::to_string(failures) + " failures"};
}

// 5. ADvLM collapses to PGD, and PGD with one full step to FGSM.
Outcome degeneracy() {
  const Workbench& wb = workbenches().get(1);
  const auto eval = wb.bench.eval();
  std::size_t mismatches = 0, checked = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(eval.size(), 10); ++i, ++checked) {
    const Scenario& s = eval[i];
    AttackConfig cfg = seeded_config(1);
    cfg.prompt_width = 1;
    cfg.use_transforms = false;
    cfg.lambda = 0.0;
    cfg.pivotal_frames = s.frames.size();
    cfg.use_pivotal = false;
    Rng a(cfg.seed), b(cfg.seed);
    const auto adv = advlm_attack(s, wb.library, wb.victim, cfg, a);
    const auto pgd = pgd_attack(s, s.prompt, wb.victim, cfg, b);
    if (adv.perturbation.delta != pgd.perturbation.delta) ++mismatches;
    cfg.steps = 1;
    cfg.step_size = cfg.epsilon;
    Rng c(cfg.seed);
    const auto one = advlm_attack(s, wb.library, wb.victim, cfg, c);
    const auto fgsm = fgsm_attack(s, s.prompt, wb.victim, cfg);
    if (one.perturbation.delta != fgsm.delta) ++mismatches;
  }
  return {mismatches == 0,
          std::to_string(checked) + " scenarios, " + std::to_string(mismatches) + " non-identical deltas"};
}

struct DirectionalRow {
  int seed = 0;
  double clean = 0;
  double advlm_seed = 0, pgd_seed = 0, advlm_p5 = 0, pgd_p5 = 0;
};

// 6. ADvLM versus PGD under the seed prompt and under held-out paraphrases.
Outcome directional_analog() {
  const auto t0 = Clock::now();
  const double prebuilt = workbenches().build_seconds();
  std::vector<DirectionalRow> rows;
  int a_ok = 0, b_ok = 0, clean_ok = 0;
  std::ostringstream detail;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Workbench& wb = workbenches().get(seed);
    const auto eval = wb.bench.eval();
    EvalOptions opts;
    opts.paraphrase_modes = {0, 5};
    const std::vector<std::string> methods{"advlm", "pgd"};
    const EvalReport r = run_attack_eval(methods, eval, wb.library, wb.victim, seeded_config(seed), opts);
    DirectionalRow row;
    row.seed = seed;
    row.clean = task_score(wb.victim, eval, 0);
    row.advlm_seed = r.method("advlm").drop.at("seed-only");
    row.pgd_seed = r.method("pgd").drop.at("seed-only");
    row.advlm_p5 = r.method("advlm").drop.at("paraphrase-5");
    row.pgd_p5 = r.method("pgd").drop.at("paraphrase-5");
    const double gap_seed = row.advlm_seed - row.pgd_seed, gap_p5 = row.advlm_p5 - row.pgd_p5;
    clean_ok += row.clean >= 90.0;
    a_ok += row.advlm_seed >= row.pgd_seed;
    b_ok += gap_p5 > gap_seed;
    detail << "\n    seed " << seed << ": clean " << fmt(row.clean) << ", seed-only drop advlm " << fmt(row.advlm_seed)
           << " pgd " << fmt(row.pgd_seed) << ", paraphrase-5 drop advlm " << fmt(row.advlm_p5) << " pgd "
           << fmt(row.pgd_p5) << ", gap " << fmt(gap_seed) << " -> " << fmt(gap_p5);
    rows.push_back(row);
  }
  // Victim training counts towards the run time even when an earlier
  // criterion already built the workbench.
  const double secs = seconds_since(t0) + prebuilt;
  const bool pass = clean_ok == kSeeds && a_ok >= 4 && b_ok >= 4 && secs < 600.0;
  std::ostringstream head;
  head << "clean>=90 in " << clean_ok << "/5, (a) advlm>=pgd seed-only in " << a_ok << "/5 (need 4), (b) gap grows in "
       << "paraphrase-5 in " << b_ok << "/5 (need 4), " << fmt(secs) << " s (limit 600 s)";
  return {pass, head.str() + detail.str()};
}

// 7. Cross-prompt attention similarity falls after the attack.
Outcome attention_direction() {
  std::size_t decreased = 0, total = 0;
  std::ostringstream detail;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Workbench& wb = workbenches().get(seed);
    const auto eval = wb.bench.eval();
    const AttackConfig cfg = seeded_config(seed);
    std::vector<Perturbation> deltas(eval.size());
    for (std::size_t i = 0; i < eval.size(); ++i) deltas[i] = craft("advlm", eval[i], wb.library, wb.victim, cfg);
    const AttentionTable t = attention_divergence(wb.victim, eval, deltas, wb.library, cfg);
    for (const auto& row : t.rows) decreased += row.sim_after < row.sim_before;
    total += t.rows.size();
    detail << "\n    seed " << seed << ": sim " << fmt(t.sim_before) << " -> " << fmt(t.sim_after) << ", decreased on "
           << fmt(100.0 * t.fraction_decreased, 3) << "%";
  }
  const double frac = static_cast<double>(decreased) / static_cast<double>(total);
  return {frac >= 0.8, "decreased on " + std::to_string(decreased) + "/" + std::to_string(total) + " scenarios (" +
                           fmt(100.0 * frac, 3) + "%, need 80%)" + detail.str()};
}

// 8. Larger budgets and more steps hurt at least as much.
Outcome ablation_monotonicity() {
  double budget_lo = 0, budget_hi = 0, steps_lo = 0, steps_hi = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Workbench& wb = workbenches().get(seed);
    const auto eval = wb.bench.eval();
    const AttackConfig cfg = seeded_config(seed);
    const std::vector<double> budgets{0.02, 0.2}, steps{3, 50};
    const auto b = ablation_sweep(AblationAxis::kBudget, budgets, eval, wb.library, wb.victim, cfg);
    const auto n = ablation_sweep(AblationAxis::kSteps, steps, eval, wb.library, wb.victim, cfg);
    budget_lo += b[0].drop / kSeeds;
    budget_hi += b[1].drop / kSeeds;
    steps_lo += n[0].drop / kSeeds;
    steps_hi += n[1].drop / kSeeds;
  }
  return {budget_hi >= budget_lo && steps_hi >= steps_lo,
          "mean drop eps 0.02 -> 0.2: " + fmt(budget_lo) + " -> " + fmt(budget_hi) + ", steps 3 -> 50: " +
              fmt(steps_lo) + " -> " + fmt(steps_hi)};
}

// 9. Perturbations crafted on one victim degrade an independently trained one.
Outcome transfer_analog() {
  int ok = 0;
  std::ostringstream detail;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Workbench& wb = workbenches().get(seed);
    const EmbeddingTable table = default_embeddings();
    const ToyVlm other = train_victim(wb.bench, vocabulary_from(table), static_cast<std::uint64_t>(seed) + 1000);
    EvalOptions opts;
    opts.paraphrase_modes = {0};
    const std::vector<std::string> methods{"advlm"};
    const auto eval = wb.bench.eval();
    const EvalReport r = transfer_eval(wb.victim, other, methods, eval, wb.library, seeded_config(seed), opts);
    const double drop = r.method("advlm").drop.at("seed-only");
    ok += drop > 0.0;
    detail << (seed > 1 ? ", " : " (") << fmt(drop);
  }
  return {ok >= 3, "victim-B drop > 0 in " + std::to_string(ok) + "/5 seeds (need 3)" + detail.str() + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::string* out) {
  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  const int code = cli::cli_main(args);
  std::cout.rdbuf(old);
  std::string s = captured.str();
  while (!s.empty() && s.back() == '\n') s.pop_back();
  if (out) *out = s;
  return code;
}

// 10. Every artifact regenerated from its config echo matches byte for byte.
Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "advlm_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path config = root / "run.toml";
  std::ofstream(config) << "seed = 17\nbenchmark_size = 30\nmin_frames = 3\nmax_frames = 5\nepochs = 3\n"
                        << "steps = 6\nlimit = 6\nlibrary_width = 3\nprobes = 4\npivotal_frames = 2\n"
                        << "output = \"" << (root / "a").string() << "\"\n";
  std::vector<std::string> mismatched;
  auto check = [&](const std::string& run_dir, const std::vector<std::string>& files) {
    std::string replay;
    const fs::path echo = fs::path(run_dir) / "config.toml";
    const std::string command = fs::path(run_dir).filename().string().substr(0, fs::path(run_dir).filename().string().rfind('-'));
    if (run_cli({command, "-c", echo.string(), "--output", (root / "b").string()}, &replay) != 0) {
      mismatched.push_back(command + " (replay failed)");
      return;
    }
    if (fs::is_regular_file(replay)) replay = fs::path(replay).parent_path().string();
    for (const auto& f : files) {
      const fs::path a = fs::path(run_dir) / f, b = fs::path(replay) / f;
      if (!fs::exists(a) || slurp(a) != slurp(b)) mismatched.push_back(command + "/" + f);
    }
  };
  std::string manifest, weights, library, eval_dir, attack_dir, attention_dir, ablate_csv;
  const std::string c = config.string();
  if (run_cli({"gen-bench", "-c", c}, &manifest) != 0) return {false, "gen-bench failed"};
  if (run_cli({"train", "-c", c, "--benchmark", manifest}, &weights) != 0) return {false, "train failed"};
  if (run_cli({"build-library", "-c", c, "--benchmark", manifest, "--weights", weights}, &library) != 0) {
    return {false, "build-library failed"};
  }
  const std::vector<std::string> paths{"--benchmark", manifest, "--weights", weights, "--library", library};
  auto with = [&](std::vector<std::string> head) {
    head.insert(head.end(), paths.begin(), paths.end());
    return head;
  };
  if (run_cli(with({"eval", "-c", c}), &eval_dir) != 0) return {false, "eval failed"};
  if (run_cli(with({"attack", "-c", c}), &attack_dir) != 0) return {false, "attack failed"};
  if (run_cli(with({"analyze-attention", "-c", c}), &attention_dir) != 0) return {false, "analyze-attention failed"};
  if (run_cli(with({"ablate", "-c", c, "--axis", "budget", "--values", "0.02,0.2"}), &ablate_csv) != 0) {
    return {false, "ablate failed"};
  }
  check(fs::path(manifest).parent_path().string(), {"manifest.json", "frames/sc0000_0.advt"});
  check(fs::path(weights).parent_path().string(), {"weights.advlm", "loss.csv"});
  check(fs::path(library).parent_path().string(), {"library.json"});
  check(eval_dir, {"report.json", "summary.csv", "scenarios.csv"});
  check(attack_dir, {"attack.csv"});
  check(attention_dir, {"attention.json", "attention.csv"});
  check(fs::path(ablate_csv).parent_path().string(), {fs::path(ablate_csv).filename().string()});
  fs::remove_all(root);
  std::string list;
  for (const auto& m : mismatched) list += " " + m;
  return {mismatched.empty(), "7 commands replayed from their config echo, " + std::to_string(mismatched.size()) +
                                  " differing artifacts" + list};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace advlm

int main(int argc, char** argv) {
  using namespace advlm;
  const std::vector<Criterion> criteria{
      {1, "gradient fidelity", gradient_fidelity},
      {2, "threat-model invariants", threat_model_invariants},
      {3, "greedy selection oracle", greedy_oracle},
      {4, "metric identities", metric_identities},
      {5, "degeneracy equivalence", degeneracy},
      {6, "ADvLM vs PGD under paraphrases", directional_analog},
      {7, "attention similarity falls", attention_direction},
      {8, "ablation monotonicity", ablation_monotonicity},
      {9, "transfer", transfer_analog},
      {10, "reproducibility", reproducibility},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.number)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << c.number << "] " << c.name << ": " << o.detail << "  ("
              << fmt(seconds_since(t0), 3) << " s)" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << std::endl;
  return failed == 0 ? 0 : 1;
}

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


#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "advlm/error.hpp"
#include "advlm/evaluation.hpp"
#include "test_util.hpp"

namespace advlm {
namespace {

namespace fs = std::filesystem;

BenchmarkOptions small_options() {
  BenchmarkOptions o;
  o.height = 12;
  o.width = 12;
  o.min_frames = 2;
  o.max_frames = 3;
  return o;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("advlm_eval_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Benchmark, DeterministicAndWellFormed) {
  Rng a(10, 1), b(10, 1);
  const auto x = generate_benchmark(a, 20, small_options());
  const auto y = generate_benchmark(b, 20, small_options());
  ASSERT_EQ(x.scenarios.size(), 20u);
  EXPECT_EQ(x.train().size(), 16u);
  EXPECT_EQ(x.eval().size(), 4u);
  for (std::size_t i = 0; i < x.scenarios.size(); ++i) {
    const Scenario& s = x.scenarios[i];
    EXPECT_EQ(s.id, y.scenarios[i].id);
    EXPECT_EQ(s.frames.frames, y.scenarios[i].frames.frames);
    EXPECT_NO_THROW(s.validate(5));
    EXPECT_GE(s.frames.size(), 2u);
    EXPECT_LE(s.frames.size(), 3u);
    EXPECT_EQ(s.frames.frame_shape(), (Shape{3, 12, 12}));
  }
  Rng c(11, 1);
  EXPECT_NE(generate_benchmark(c, 20, small_options()).scenarios[0].frames.frames, x.scenarios[0].frames.frames);
  Rng d(1);
  EXPECT_THROW(generate_benchmark(d, 0), InvalidArgument);
}

TEST(Benchmark, WriteLoadRoundTrip) {
  const auto dir = scratch("bench");
  Rng rng(3);
  const auto bench = generate_benchmark(rng, 6, small_options());
  write_benchmark(bench, dir.string());
  EXPECT_TRUE(fs::exists(dir / "frames" / "sc0000_0.advt"));
  const auto back = load_benchmark((dir / "manifest.json").string());
  ASSERT_EQ(back.scenarios.size(), bench.scenarios.size());
  EXPECT_EQ(back.is_train, bench.is_train);
  for (std::size_t i = 0; i < bench.scenarios.size(); ++i) {
    EXPECT_EQ(back.scenarios[i].frames.frames, bench.scenarios[i].frames.frames);
    EXPECT_EQ(back.scenarios[i].prompt, bench.scenarios[i].prompt);
    EXPECT_EQ(back.scenarios[i].target, bench.scenarios[i].target);
  }
  fs::remove_all(dir);
}

TEST(Benchmark, ManifestErrors) {
  const auto dir = scratch("manifest");
  Rng rng(3);
  write_benchmark(generate_benchmark(rng, 3, small_options()), dir.string());
  const auto manifest = dir / "manifest.json";
  std::ifstream in(manifest);
  auto j = nlohmann::json::parse(in);
  in.close();

  auto dup = j;
  dup["scenarios"][1]["id"] = dup["scenarios"][0]["id"];
  std::ofstream(dir / "dup.json") << dup.dump();
  EXPECT_THROW(load_benchmark((dir / "dup.json").string()), IoError);

  fs::remove(dir / "frames" / "sc0002_0.advt");
  EXPECT_THROW(load_benchmark(manifest.string()), IoError);
  std::ofstream(dir / "broken.json") << "{ nope";
  EXPECT_THROW(load_benchmark((dir / "broken.json").string()), IoError);
  EXPECT_THROW(load_benchmark((dir / "absent.json").string()), IoError);
  fs::remove_all(dir);
}

TEST(Paraphrases, HeldOutAreDeterministicAndUnseen) {
  const auto& seed = benchmark_seed_prompts()[0].text;
  const auto a = held_out_paraphrases(seed, 5);
  EXPECT_EQ(a, held_out_paraphrases(seed, 5));
  EXPECT_EQ(a.size(), 5u);
  Rng rng(1);
  const auto lib = RulesGenerator(SynonymPartition::kLibrary).generate(seed, 30, rng);
  for (const auto& p : a) EXPECT_EQ(std::count(lib.begin(), lib.end(), p), 0) << p;
  EXPECT_EQ(mode_name(0), "seed-only");
  EXPECT_EQ(mode_name(3), "paraphrase-3");
}

class EvalTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(5);
    bench = generate_benchmark(rng, 12, small_options());
    scenarios = bench.eval();
    for (const auto& s : bench.train()) probes.push_back(s.frames);
    probes.resize(3);
    library = testing::tiny_library(model, probes, 3);
    cfg.steps = 3;
    cfg.epsilon = 0.05;
    cfg.prompt_width = 2;
    cfg.pivotal_frames = 2;
    cfg.seed = 9;
  }

  ToyVlm model = testing::tiny_model(6, 12);
  Benchmark bench;
  std::vector<Scenario> scenarios;
  std::vector<FrameSequence> probes;
  PromptLibrary library;
  AttackConfig cfg;
};

TEST_F(EvalTest, TaskScoreInRange) {
  for (std::size_t k : {0u, 3u, 5u}) {
    const double s = task_score(model, bench.scenarios, k);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 100.0);
  }
  // A single-prompt score is a multiple of 100 / n.
  const double one = task_score(model, std::span(bench.scenarios).subspan(0, 4), 0);
  EXPECT_NEAR(std::fmod(one, 25.0), 0.0, 1e-9);
}

TEST_F(EvalTest, ZeroControlHasNoDrop) {
  const std::vector<std::string> methods{"none"};
  const auto report = run_attack_eval(methods, scenarios, library, model, cfg);
  for (const auto& [mode, drop] : report.method("none").drop) EXPECT_EQ(drop, 0.0) << mode;
  EXPECT_EQ(report.method("none").mean_linf, 0.0);
  EXPECT_THROW(report.method("pgd"), InvalidArgument);
}

TEST_F(EvalTest, ReportIsConsistentAndParallelSafe) {
  const std::vector<std::string> methods{"advlm", "pgd", "fgsm"};
  EvalOptions serial, threaded;
  threaded.jobs = 3;
  const auto a = run_attack_eval(methods, scenarios, library, model, cfg, serial);
  const auto b = run_attack_eval(methods, scenarios, library, model, cfg, threaded);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  for (const auto& m : a.methods) {
    EXPECT_LE(m.mean_linf, cfg.epsilon + 1e-9);
    for (const auto& [mode, c] : m.clean) EXPECT_DOUBLE_EQ(m.drop.at(mode), c - m.attacked.at(mode));
  }
  EXPECT_EQ(a.rows.size(), methods.size() * scenarios.size());
  EXPECT_EQ(a.config.at("attack").at("epsilon"), cfg.epsilon);
  EXPECT_THROW(craft("magic", scenarios[0], library, model, cfg), InvalidArgument);
}

TEST_F(EvalTest, ReportFiles) {
  const auto dir = scratch("report");
  const std::vector<std::string> methods{"pgd"};
  const auto r = run_attack_eval(methods, scenarios, library, model, cfg);
  r.save(dir.string());
  for (const char* f : {"report.json", "summary.csv", "scenarios.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream csv(dir / "summary.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "method,mode,clean,attacked,drop,mean_linf");
  std::ifstream js(dir / "report.json");
  EXPECT_EQ(nlohmann::json::parse(js), r.to_json());
  fs::remove_all(dir);
}

TEST_F(EvalTest, EvaluationViews) {
  EvalOptions off;
  off.warped_views = false;
  for (const auto& v : evaluation_views(scenarios[0], off, cfg.ranges)) EXPECT_TRUE(v.is_identity());
  EvalOptions on;
  EXPECT_EQ(evaluation_views(scenarios[0], on, cfg.ranges).size(), scenarios[0].frames.size());
  const auto f = evaluation_frames(scenarios[0], nullptr, off, cfg.ranges);
  EXPECT_EQ(f, scenarios[0].frames.frames);
}

TEST_F(EvalTest, Transfer) {
  const ToyVlm other = testing::tiny_model(7, 12);
  const ToyVlm twin = testing::tiny_model(6, 12);
  const std::vector<std::string> methods{"fgsm"};
  EXPECT_THROW(transfer_eval(model, twin, methods, scenarios, library, cfg), InvalidArgument);
  EXPECT_NO_THROW(transfer_eval(model, model, methods, scenarios, library, cfg));
  const auto r = transfer_eval(model, other, methods, scenarios, library, cfg);
  EXPECT_EQ(r.extra.at("transfer"), true);
}

TEST_F(EvalTest, AttentionZeroDeltaUnchanged) {
  std::vector<Perturbation> zeros(scenarios.size(), Perturbation::zeros({3, 12, 12}, cfg.epsilon));
  const auto t = attention_divergence(model, scenarios, zeros, library, cfg, 2);
  ASSERT_EQ(t.rows.size(), scenarios.size());
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.ssim_before, r.ssim_after);
    EXPECT_EQ(r.pcc_before, r.pcc_after);
    EXPECT_EQ(r.view_sim_before, r.view_sim_after);
  }
  EXPECT_EQ(t.fraction_decreased, 0.0);
  std::vector<Perturbation> short_list(1, zeros[0]);
  EXPECT_THROW(attention_divergence(model, scenarios, short_list, library, cfg), InvalidArgument);
}

TEST_F(EvalTest, AblationAxes) {
  EXPECT_EQ(parse_ablation_axis("budget"), AblationAxis::kBudget);
  EXPECT_EQ(to_string(AblationAxis::kSteps), "steps");
  EXPECT_THROW(parse_ablation_axis("colour"), InvalidArgument);
  EXPECT_EQ(ablation_config(AblationAxis::kSteps, 20, cfg).steps, 20);
  EXPECT_EQ(ablation_config(AblationAxis::kBudget, 0.2, cfg).epsilon, 0.2);
  EXPECT_EQ(ablation_config(AblationAxis::kPrompts, 4, cfg).prompt_width, 4u);
  EXPECT_EQ(ablation_config(AblationAxis::kFrames, 1, cfg).pivotal_frames, 1u);
  const auto off = ablation_config(AblationAxis::kSae, 0, cfg);
  EXPECT_FALSE(off.use_transforms);
  EXPECT_FALSE(off.use_pivotal);
  EXPECT_EQ(off.lambda, 0.0);
  EXPECT_TRUE(ablation_config(AblationAxis::kSae, 1, cfg).use_transforms);
  EXPECT_THROW(ablation_config(AblationAxis::kSae, 0.5, cfg), InvalidArgument);
  EXPECT_THROW(ablation_config(AblationAxis::kLambda, 2.0, cfg), InvalidArgument);
  EXPECT_THROW(ablation_config(AblationAxis::kSteps, 0, cfg), InvalidArgument);
  for (auto axis : {AblationAxis::kSteps, AblationAxis::kBudget, AblationAxis::kPrompts, AblationAxis::kLambda,
                    AblationAxis::kFrames, AblationAxis::kSae}) {
    EXPECT_FALSE(default_ablation_values(axis).empty());
  }
}

TEST_F(EvalTest, AblationSweepCsv) {
  const std::vector<double> values{1, 2};
  const auto rows = ablation_sweep(AblationAxis::kSteps, values, scenarios, library, model, cfg);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(r.drop, r.clean - r.attacked);
  const auto dir = scratch("ablate");
  write_ablation_csv((dir / "a.csv").string(), rows);
  std::ifstream in(dir / "a.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "value,clean,attacked,drop");
  fs::remove_all(dir);
}

TEST(ParallelFor, CoversAllIndicesAndRethrows) {
  std::vector<int> hits(50, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw InvalidArgument("boom");
               }),
               InvalidArgument);
}

}  // namespace
}  // namespace advlm

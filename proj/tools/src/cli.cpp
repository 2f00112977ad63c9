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

#include "advlm/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "advlm/attack.hpp"
#include "advlm/benchmark.hpp"
#include "advlm/evaluation.hpp"
#include "advlm/pipeline.hpp"
#include "advlm/run_config.hpp"
#include "advlm/variant_generator.hpp"

namespace advlm::cli {
namespace fs = std::filesystem;

namespace {

struct Invocation {
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // key -> value from --key flags
};

std::string flag_name(const std::string& key) {
  std::string out = key;
  for (char& c : out) {
    if (c == '_') c = '-';
  }
  return out;
}

// default < config file < ADVLM_SEED < --set < --key flags
RunConfig resolve_config(const Invocation& inv) {
  RunConfig cfg;
  if (!inv.config_path.empty()) cfg = RunConfig::load(inv.config_path);
  if (const char* env = std::getenv("ADVLM_SEED"); env != nullptr && *env != '\0') {
    try {
      cfg.set("seed", env);
    } catch (const UsageError& e) {
      throw UsageError(std::string("ADVLM_SEED: ") + e.what());
    }
  }
  for (const auto& s : inv.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [key, value] : inv.flags) cfg.set(key, value);
  return cfg;
}

fs::path make_run_dir(const std::string& command, const RunConfig& cfg) {
  std::ostringstream name;
  name << command << '-' << std::hex << std::setw(16) << std::setfill('0') << cfg.hash();
  const fs::path dir = fs::path(cfg.str("output")) / name.str();
  fs::create_directories(dir);
  std::ofstream echo(dir / "config.toml");
  if (!echo) throw IoError("cannot write config echo in " + dir.string());
  echo << "# effective configuration of `advlm " << command << "`\n" << cfg.dump();
  return dir;
}

const std::string& require_path(const RunConfig& cfg, const std::string& key) {
  const std::string& p = cfg.raw(key);
  if (p.empty()) throw UsageError("missing required setting '" + key + "' (--" + flag_name(key) + ")");
  if (!fs::exists(p)) throw IoError("missing artifact: " + key + " = " + p);
  return p;
}

EmbeddingTable embeddings_for(const RunConfig& cfg) {
  const std::string& p = cfg.raw("embeddings");
  return p.empty() ? default_embeddings() : EmbeddingTable::load(p);
}

std::vector<Scenario> selected_scenarios(const Benchmark& bench, const RunConfig& cfg) {
  const std::string split = cfg.str("split");
  std::vector<Scenario> out;
  if (split == "eval") {
    out = bench.eval();
  } else if (split == "train") {
    out = bench.train();
  } else if (split == "all") {
    out = bench.scenarios;
  } else {
    throw UsageError("split must be eval, train or all, got '" + split + "'");
  }
  const long long limit = cfg.integer("limit");
  if (limit < 0) throw UsageError("limit must be >= 0");
  if (limit > 0 && static_cast<std::size_t>(limit) < out.size()) out.resize(static_cast<std::size_t>(limit));
  if (out.empty()) throw InvalidArgument("no scenarios selected (split " + split + ")");
  return out;
}

void check_method(const std::string& m) {
  if (m != "advlm" && m != "pgd" && m != "fgsm" && m != "none") {
    throw UsageError("unknown method '" + m + "' (advlm, pgd, fgsm, none)");
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

int cmd_gen_bench(const RunConfig& cfg) {
  const long long size = cfg.integer("benchmark_size");
  if (size < 1) throw UsageError("benchmark_size must be >= 1");
  const auto opts = cfg.benchmark_options();
  const fs::path dir = make_run_dir("gen-bench", cfg);
  Rng rng(cfg.u64("seed"), 0x62656e6368);
  const Benchmark bench = generate_benchmark(rng, static_cast<std::size_t>(size), opts);
  write_benchmark(bench, dir.string());
  std::cout << (dir / "manifest.json").string() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const Benchmark bench = load_benchmark(require_path(cfg, "benchmark"));
  const auto opts = cfg.victim_options();
  const fs::path dir = make_run_dir("train", cfg);
  TrainResult tr;
  const ToyVlm model = train_victim(bench, vocabulary_from(embeddings_for(cfg)), cfg.u64("seed"), opts, &tr);
  model.save((dir / "weights.advlm").string());
  model.vocab().save((dir / "vocab.txt").string());
  {
    std::ofstream loss(dir / "loss.csv");
    loss << std::setprecision(17) << "epoch,loss\n";
    for (std::size_t i = 0; i < tr.epoch_loss.size(); ++i) loss << i + 1 << ',' << tr.epoch_loss[i] << '\n';
  }
  const auto eval = bench.eval();
  nlohmann::json summary = {{"epochs", opts.epochs}, {"lr", opts.lr}, {"final_loss", tr.epoch_loss.back()}};
  if (!eval.empty()) {
    for (std::size_t k : {0, 3, 5}) summary["clean_eval_score"][mode_name(k)] = task_score(model, eval, k);
  }
  write_json(dir / "train.json", summary);
  std::cout << (dir / "weights.advlm").string() << '\n';
  return kExitOk;
}

int cmd_build_library(const RunConfig& cfg) {
  const Benchmark bench = load_benchmark(require_path(cfg, "benchmark"));
  const ToyVlm model = ToyVlm::load(require_path(cfg, "weights"));
  HttpGeneratorOptions http;
  http.endpoint = cfg.str("endpoint");
  http.model = cfg.str("llm_model");
  std::unique_ptr<VariantGenerator> gen;
  try {
    gen = make_generator(cfg.str("backend"), http);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const long long width = cfg.integer("library_width"), probes = cfg.integer("probes");
  if (width < 1 || probes < 1) throw UsageError("library_width and probes must be >= 1");
  const fs::path dir = make_run_dir("build-library", cfg);
  const PromptLibrary lib =
      build_benchmark_library(model, bench, embeddings_for(cfg), *gen, cfg.u64("seed"),
                              static_cast<std::size_t>(width), cfg.real("beta"), static_cast<std::size_t>(probes));
  lib.save((dir / "library.json").string());
  std::cout << (dir / "library.json").string() << '\n';
  return kExitOk;
}

int cmd_attack(const RunConfig& cfg) {
  const std::string method = cfg.str("method");
  check_method(method);
  const AttackConfig acfg = cfg.attack();
  const Benchmark bench = load_benchmark(require_path(cfg, "benchmark"));
  const ToyVlm model = ToyVlm::load(require_path(cfg, "weights"));
  PromptLibrary lib;
  if (method == "advlm") lib = PromptLibrary::load(require_path(cfg, "library"));
  const auto scenarios = selected_scenarios(bench, cfg);
  const int jobs = cfg.eval_options().jobs;
  const fs::path dir = make_run_dir("attack", cfg);
  fs::create_directories(dir / "perturbations");
  fs::create_directories(dir / "traces");

  if (cfg.flag("universal")) {
    if (method != "advlm") throw UsageError("universal mode is only defined for method advlm");
    Rng rng(acfg.seed, fnv1a64("universal"));
    const AttackResult r = advlm_attack_universal(scenarios, lib, model, acfg, rng);
    save_perturbation((dir / "perturbations" / "universal").string(), r.perturbation,
                      {"universal", method, acfg, scenarios.front().target});
    r.trace.save_csv((dir / "traces" / "universal.csv").string());
    std::cout << dir.string() << '\n';
    return kExitOk;
  }

  std::vector<AttackResult> results(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
    results[i] = craft_attack(method, scenarios[i], lib, model, acfg);
  });
  std::ofstream summary(dir / "attack.csv");
  summary << std::setprecision(17) << "scenario_id,target,linf,initial_target_prob,final_target_prob\n";
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    const AttackResult& r = results[i];
    save_perturbation((dir / "perturbations" / s.id).string(), r.perturbation, {s.id, method, acfg, s.target});
    if (!r.trace.steps.empty()) r.trace.save_csv((dir / "traces" / (s.id + ".csv")).string());
    const double final_prob = target_probability(model, apply(s.frames, r.perturbation), s.prompt, s.target);
    const double initial_prob = target_probability(model, s.frames, s.prompt, s.target);
    summary << s.id << ',' << s.target << ',' << r.perturbation.delta.max_abs() << ',' << initial_prob << ','
            << final_prob << '\n';
  }
  std::cout << dir.string() << '\n';
  return kExitOk;
}

std::vector<std::string> methods_of(const RunConfig& cfg) {
  auto methods = cfg.list("methods");
  if (methods.empty()) throw UsageError("methods must not be empty");
  for (const auto& m : methods) check_method(m);
  return methods;
}

int cmd_eval(const RunConfig& cfg) {
  const auto methods = methods_of(cfg);
  const AttackConfig acfg = cfg.attack();
  const EvalOptions opts = cfg.eval_options();
  const Benchmark bench = load_benchmark(require_path(cfg, "benchmark"));
  const ToyVlm model = ToyVlm::load(require_path(cfg, "weights"));
  const PromptLibrary lib = PromptLibrary::load(require_path(cfg, "library"));
  const auto scenarios = selected_scenarios(bench, cfg);
  const fs::path dir = make_run_dir("eval", cfg);
  EvalReport report = run_attack_eval(methods, scenarios, lib, model, acfg, opts);
  report.extra["benchmark_seed"] = bench.seed;
  report.save(dir.string());
  std::cout << dir.string() << '\n';
  return kExitOk;
}

int cmd_transfer(const RunConfig& cfg) {
  const auto methods = methods_of(cfg);
  const AttackConfig acfg = cfg.attack();
  const EvalOptions opts = cfg.eval_options();
  const Benchmark bench = load_benchmark(require_path(cfg, "benchmark"));
  const std::string& source_path = require_path(cfg, "weights");
  const std::string& victim_path = require_path(cfg, "victim_weights");
  const PromptLibrary lib = PromptLibrary::load(require_path(cfg, "library"));
  const auto scenarios = selected_scenarios(bench, cfg);
  const ToyVlm source = ToyVlm::load(source_path);
  std::optional<ToyVlm> victim;
  if (!fs::equivalent(source_path, victim_path)) victim = ToyVlm::load(victim_path);
  const fs::path dir = make_run_dir("transfer", cfg);
  EvalReport report = transfer_eval(source, victim ? *victim : source, methods, scenarios, lib, acfg, opts);
  report.extra["benchmark_seed"] = bench.seed;
  report.save(dir.string());
  std::cout << dir.string() << '\n';
  return kExitOk;
}

int cmd_ablate(const RunConfig& cfg) {
  AblationAxis axis{};
  try {
    axis = parse_ablation_axis(cfg.str("axis"));
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  std::vector<double> values;
  for (const auto& v : cfg.list("values")) {
    RunConfig probe;
    probe.set("epsilon", v);  // reuse the strict number parser
    values.push_back(probe.real("epsilon"));
  }
  if (values.empty()) values = default_ablation_values(axis);
  const AttackConfig base = cfg.attack();
  for (double v : values) {
    try {
      (void)ablation_config(axis, v, base);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  const EvalOptions opts = cfg.eval_options();
  const Benchmark bench = load_benchmark(require_path(cfg, "benchmark"));
  const ToyVlm model = ToyVlm::load(require_path(cfg, "weights"));
  const PromptLibrary lib = PromptLibrary::load(require_path(cfg, "library"));
  const auto scenarios = selected_scenarios(bench, cfg);
  const fs::path dir = make_run_dir("ablate", cfg);
  const auto rows = ablation_sweep(axis, values, scenarios, lib, model, base, opts);
  const fs::path out = dir / ("ablation_" + to_string(axis) + ".csv");
  write_ablation_csv(out.string(), rows);
  std::cout << out.string() << '\n';
  return kExitOk;
}

int cmd_analyze_attention(const RunConfig& cfg) {
  const AttackConfig acfg = cfg.attack();
  const int jobs = cfg.eval_options().jobs;
  const long long views = cfg.integer("attention_views");
  if (views < 1) throw UsageError("attention_views must be >= 1");
  const Benchmark bench = load_benchmark(require_path(cfg, "benchmark"));
  const ToyVlm model = ToyVlm::load(require_path(cfg, "weights"));
  const PromptLibrary lib = PromptLibrary::load(require_path(cfg, "library"));
  const auto scenarios = selected_scenarios(bench, cfg);
  const fs::path dir = make_run_dir("analyze-attention", cfg);
  std::vector<Perturbation> deltas(scenarios.size());
  parallel_for(scenarios.size(), jobs,
               [&](std::size_t i) { deltas[i] = craft("advlm", scenarios[i], lib, model, acfg); });
  const AttentionTable table =
      attention_divergence(model, scenarios, deltas, lib, acfg, static_cast<std::size_t>(views), jobs);
  write_json(dir / "attention.json", table.to_json());
  std::ofstream csv(dir / "attention.csv");
  csv << std::setprecision(17)
      << "scenario_id,ssim_before,pcc_before,sim_before,ssim_after,pcc_after,sim_after,view_sim_before,"
         "view_sim_after\n";
  for (const auto& r : table.rows) {
    csv << r.scenario_id << ',' << r.ssim_before << ',' << r.pcc_before << ',' << r.sim_before << ','
        << r.ssim_after << ',' << r.pcc_after << ',' << r.sim_after << ',' << r.view_sim_before << ','
        << r.view_sim_after << '\n';
  }
  std::cout << dir.string() << '\n';
  return kExitOk;
}

// Plot-ready series from an earlier eval, transfer or analyze-attention run.
int cmd_report(const RunConfig& cfg) {
  const fs::path run = require_path(cfg, "run");
  const fs::path dir = make_run_dir("report", cfg);
  bool any = false;
  if (fs::exists(run / "report.json")) {
    std::ifstream in(run / "report.json");
    const auto j = nlohmann::json::parse(in);
    const auto& ref = j.at("reference").at("textual_variability_drop");
    std::ofstream out(dir / "drop_by_mode.csv");
    out << std::setprecision(17) << "method,mode,clean,attacked,drop,reference_drop\n";
    for (const auto& m : j.at("methods")) {
      const std::string method = m.at("method");
      for (const auto& [mode, drop] : m.at("drop").items()) {
        out << method << ',' << mode << ',' << m.at("clean").at(mode).get<double>() << ','
            << m.at("attacked").at(mode).get<double>() << ',' << drop.get<double>() << ',';
        if (ref.contains(mode) && ref.at(mode).contains(method)) out << ref.at(mode).at(method).get<double>();
        out << '\n';
      }
    }
    any = true;
  }
  if (fs::exists(run / "attention.json")) {
    std::ifstream in(run / "attention.json");
    const auto j = nlohmann::json::parse(in);
    std::ofstream out(dir / "attention_summary.csv");
    out << std::setprecision(17) << "stage,ssim,pcc,sim,reference_ssim,reference_pcc\n";
    for (const std::string stage : {"before", "after"}) {
      out << stage << ',' << j.at("ssim_" + stage).get<double>() << ',' << j.at("pcc_" + stage).get<double>()
          << ',' << j.at("sim_" + stage).get<double>() << ','
          << j.at("reference").at(stage).at("ssim").get<double>() << ','
          << j.at("reference").at(stage).at("pcc").get<double>() << '\n';
    }
    any = true;
  }
  for (const auto& entry : fs::directory_iterator(run)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("ablation_", 0) == 0 && entry.path().extension() == ".csv") {
      fs::copy_file(entry.path(), dir / name, fs::copy_options::overwrite_existing);
      any = true;
    }
  }
  if (!any) throw IoError("run directory " + run.string() + " holds no report, attention or ablation output");
  std::cout << dir.string() << '\n';
  return kExitOk;
}

using Handler = int (*)(const RunConfig&);

struct Command {
  const char* name;
  const char* help;
  Handler handler;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds{
      {"gen-bench", "Generate the synthetic driving benchmark", cmd_gen_bench},
      {"train", "Train a victim model on a benchmark", cmd_train},
      {"build-library", "Build the prompt variant library", cmd_build_library},
      {"attack", "Craft perturbations with --method advlm|pgd|fgsm", cmd_attack},
      {"eval", "Score methods under seed-only and paraphrase modes", cmd_eval},
      {"transfer", "Score perturbations crafted on one model against another", cmd_transfer},
      {"ablate", "Sweep one setting with --axis steps|budget|prompts|lambda|frames|sae", cmd_ablate},
      {"analyze-attention", "Attention-map similarity before and after the attack", cmd_analyze_attention},
      {"report", "Emit CSV series for plotting from an earlier run (--run DIR)", cmd_report},
  };
  return cmds;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Adversarial attacks on a toy driving vision-language model", "advlm"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Invocation inv;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("-c,--config", inv.config_path, "TOML-style key = value file");
    sub->add_option("--set", inv.sets, "Override any config key (KEY=VALUE)");
    for (const auto& key : config_keys()) {
      sub->add_option_function<std::string>(
          "--" + flag_name(key.key), [&inv, k = key.key](const std::string& v) { inv.flags[k] = v; },
          key.help + " [default: " + key.default_value + "]");
    }
    sub->callback([&inv, name = std::string(cmd.name)] { inv.command = name; });
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, std::cout, std::cerr);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, std::cout, std::cerr);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return kExitUsage;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands()) {
    if (inv.command == c.name) cmd = &c;
  }
  try {
    const RunConfig cfg = resolve_config(inv);
    return cmd->handler(cfg);
  } catch (const UsageError& e) {
    std::cerr << "advlm " << inv.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "advlm " << inv.command << ": error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

}  // namespace advlm::cli

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

#include "advlm/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "advlm/rng.hpp"

namespace advlm::cli {

const std::vector<KeySpec>& config_keys() {
  using K = ValueKind;
  static const std::vector<KeySpec> keys{
      {"seed", K::kUInt, "1", "global seed (ADVLM_SEED overrides the config file)"},
      // attack
      {"epsilon", K::kDouble, "0.1", "L-infinity budget"},
      {"steps", K::kInt, "50", "attack iterations n"},
      {"step_size", K::kOptionalDouble, "auto", "sign-step size; auto = 2 * epsilon / steps"},
      {"lambda", K::kDouble, "0.4", "scene-term weight"},
      {"pivotal_frames", K::kInt, "6", "pivotal frame count"},
      {"prompt_width", K::kInt, "3", "texts per attack: seed plus width - 1 variants"},
      {"mode", K::kString, "targeted", "targeted or untargeted"},
      {"method", K::kString, "advlm", "attack method for the attack command"},
      {"transforms_per_step", K::kInt, "1", "affine draws averaged per step"},
      {"use_transforms", K::kBool, "true", "sample affine views while attacking"},
      {"use_pivotal", K::kBool, "true", "restrict the scene term to pivotal frames"},
      {"reselect_pivotal", K::kBool, "false", "re-run pivotal selection every step"},
      {"universal", K::kBool, "false", "attack: one delta for every selected scenario"},
      {"max_rotation_deg", K::kDouble, "5", "affine rotation range in degrees"},
      {"max_translation", K::kDouble, "0.05", "affine translation range (fraction of size)"},
      {"min_scale", K::kDouble, "0.95", "affine minimum scale"},
      {"max_scale", K::kDouble, "1.05", "affine maximum scale"},
      // benchmark and victim
      {"benchmark_size", K::kInt, "200", "scenarios generated by gen-bench"},
      {"min_frames", K::kInt, "4", "shortest generated sequence"},
      {"max_frames", K::kInt, "8", "longest generated sequence"},
      {"epochs", K::kInt, "40", "victim training epochs"},
      {"lr", K::kDouble, "0.015", "victim SGD learning rate"},
      {"embed_init_std", K::kDouble, "1.5", "victim token embedding init scale"},
      // library
      {"library_width", K::kInt, "5", "variants kept per seed prompt"},
      {"beta", K::kDouble, "0.5", "diversity weight in the penalty"},
      {"probes", K::kInt, "8", "probe sequences for semantic entropy"},
      {"backend", K::kString, "rules", "variant generator: rules, rules:held-out or http"},
      {"endpoint", K::kString, "", "chat-completions URL for the http backend"},
      {"llm_model", K::kString, "gpt-4o", "model name sent to the http backend"},
      // evaluation
      {"methods", K::kStringList, "advlm,pgd,fgsm", "methods scored by eval and transfer"},
      {"paraphrase_modes", K::kIntList, "0,3,5", "0 = seed only, k = k held-out paraphrases"},
      {"warped_views", K::kBool, "true", "score on warped views of each frame"},
      {"view_seed", K::kUInt, "1986618743", "seed of the evaluation views"},
      {"split", K::kString, "eval", "scenarios to attack: eval, train or all"},
      {"limit", K::kInt, "0", "use only the first N selected scenarios (0 = all)"},
      {"axis", K::kString, "steps", "ablation axis"},
      {"values", K::kStringList, "", "ablation values (empty = default grid)"},
      {"attention_views", K::kInt, "3", "views per frame in attention analysis"},
      {"jobs", K::kInt, "1", "scenario-parallel worker threads"},
      // paths
      {"benchmark", K::kString, "", "benchmark manifest.json"},
      {"weights", K::kString, "", "victim weights (source model for transfer)"},
      {"victim_weights", K::kString, "", "transfer victim weights"},
      {"library", K::kString, "", "prompt library JSON"},
      {"embeddings", K::kString, "", "word-vector table (empty = bundled)"},
      {"run", K::kString, "", "run directory read by the report command"},
      {"output", K::kString, "runs", "root under which run directories are created"},
  };
  return keys;
}

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : config_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

std::vector<std::string> split_list(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw UsageError("unterminated list '" + std::string(text) + "'");
    text = trim(text.substr(1, text.size() - 2));
  }
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    std::string_view item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (item.size() >= 2 && item.front() == '"' && item.back() == '"') item = item.substr(1, item.size() - 2);
    if (item.empty()) throw UsageError("empty list element in '" + std::string(text) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  T v{};
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty()) {
    throw UsageError("key '" + std::string(key) + "': expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
    throw UsageError("key '" + std::string(key) + "': expected a finite number, got '" + std::string(text) + "'");
  }
  return v;
}

std::string canonical(const KeySpec& spec, std::string_view text) {
  switch (spec.kind) {
    case ValueKind::kInt: return std::to_string(parse_integer<long long>(spec.key, text));
    case ValueKind::kUInt: return std::to_string(parse_integer<std::uint64_t>(spec.key, text));
    case ValueKind::kDouble: return format_double(parse_double(spec.key, text));
    case ValueKind::kOptionalDouble:
      return text == "auto" ? std::string("auto") : format_double(parse_double(spec.key, text));
    case ValueKind::kBool:
      if (text == "true" || text == "1" || text == "yes") return "true";
      if (text == "false" || text == "0" || text == "no") return "false";
      throw UsageError("key '" + spec.key + "': expected true or false, got '" + std::string(text) + "'");
    case ValueKind::kString: return std::string(text);
    case ValueKind::kIntList: {
      std::string out;
      for (const auto& item : split_list(text)) {
        if (!out.empty()) out += ',';
        out += std::to_string(parse_integer<std::size_t>(spec.key, item));
      }
      return out;
    }
    case ValueKind::kStringList: {
      std::string out;
      for (const auto& item : split_list(text)) {
        if (!out.empty()) out += ',';
        out += item;
      }
      return out;
    }
  }
  return std::string(text);
}

// Value text of one config line: a quoted string or a bare token up to '#'.
std::string line_value(std::string_view rest, const std::string& where) {
  rest = trim(rest);
  if (!rest.empty() && rest.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < rest.size() && rest[i] != '"'; ++i) {
      if (rest[i] == '\\' && i + 1 < rest.size()) ++i;
      out.push_back(rest[i]);
    }
    if (i >= rest.size()) throw UsageError(where + ": unterminated string");
    const auto tail = trim(rest.substr(i + 1));
    if (!tail.empty() && tail.front() != '#') throw UsageError(where + ": trailing text after string");
    return out;
  }
  const auto hash = rest.find('#');
  return std::string(trim(rest.substr(0, hash)));
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + '"';
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.key] = k.default_value;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw UsageError("unknown config key '" + std::string(key) + "'");
  values_[spec->key] = canonical(*spec, trim(value));
}

void RunConfig::merge(std::string_view text, const std::string& origin) {
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    if (l.front() == '[') throw UsageError(where + ": tables are not supported; use flat keys");
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw UsageError(where + ": expected key = value");
    const std::string key(trim(l.substr(0, eq)));
    if (!seen.insert(key).second) throw UsageError(where + ": duplicate key '" + key + "'");
    try {
      set(key, line_value(l.substr(eq + 1), where));
    } catch (const UsageError& e) {
      throw UsageError(where + ": " + e.what());
    }
  }
}

RunConfig RunConfig::parse(std::string_view text, const std::string& origin) {
  RunConfig c;
  c.merge(text, origin);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const std::string& RunConfig::raw(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

long long RunConfig::integer(std::string_view key) const { return parse_integer<long long>(key, raw(key)); }
std::uint64_t RunConfig::u64(std::string_view key) const { return parse_integer<std::uint64_t>(key, raw(key)); }
double RunConfig::real(std::string_view key) const { return parse_double(key, raw(key)); }
bool RunConfig::flag(std::string_view key) const { return raw(key) == "true"; }

std::vector<std::string> RunConfig::list(std::string_view key) const { return split_list(raw(key)); }

std::vector<std::size_t> RunConfig::size_list(std::string_view key) const {
  std::vector<std::size_t> out;
  for (const auto& s : list(key)) out.push_back(parse_integer<std::size_t>(key, s));
  return out;
}

std::string RunConfig::dump() const {
  std::ostringstream out;
  for (const auto& k : config_keys()) {
    const std::string& v = values_.at(k.key);
    out << k.key << " = ";
    switch (k.kind) {
      case ValueKind::kString: out << quote(v); break;
      case ValueKind::kOptionalDouble: out << (v == "auto" ? quote(v) : v); break;
      case ValueKind::kIntList:
      case ValueKind::kStringList: {
        out << '[';
        const auto items = split_list(v);
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (i > 0) out << ", ";
          out << (k.kind == ValueKind::kStringList ? quote(items[i]) : items[i]);
        }
        out << ']';
        break;
      }
      default: out << v;
    }
    out << '\n';
  }
  return out.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a64(dump()); }

namespace {

std::size_t positive(long long v, std::string_view key) {
  if (v < 1) throw UsageError("key '" + std::string(key) + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

}  // namespace

AttackConfig RunConfig::attack() const {
  AttackConfig c;
  c.epsilon = real("epsilon");
  c.steps = static_cast<int>(positive(integer("steps"), "steps"));
  if (raw("step_size") != "auto") c.step_size = real("step_size");
  c.lambda = real("lambda");
  c.pivotal_frames = positive(integer("pivotal_frames"), "pivotal_frames");
  c.prompt_width = positive(integer("prompt_width"), "prompt_width");
  try {
    c.mode = parse_attack_mode(raw("mode"));
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  c.seed = u64("seed");
  c.transforms_per_step = static_cast<int>(positive(integer("transforms_per_step"), "transforms_per_step"));
  c.use_transforms = flag("use_transforms");
  c.use_pivotal = flag("use_pivotal");
  c.reselect_pivotal = flag("reselect_pivotal");
  c.ranges.max_rotation = real("max_rotation_deg") * std::numbers::pi / 180.0;
  c.ranges.max_translation = real("max_translation");
  c.ranges.min_scale = real("min_scale");
  c.ranges.max_scale = real("max_scale");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return c;
}

EvalOptions RunConfig::eval_options() const {
  EvalOptions o;
  o.paraphrase_modes = size_list("paraphrase_modes");
  if (o.paraphrase_modes.empty()) throw UsageError("paraphrase_modes must not be empty");
  o.warped_views = flag("warped_views");
  o.view_seed = u64("view_seed");
  o.jobs = static_cast<int>(positive(integer("jobs"), "jobs"));
  return o;
}

VictimOptions RunConfig::victim_options() const {
  VictimOptions o;
  o.epochs = static_cast<int>(positive(integer("epochs"), "epochs"));
  o.lr = real("lr");
  o.embed_init_std = real("embed_init_std");
  return o;
}

BenchmarkOptions RunConfig::benchmark_options() const {
  BenchmarkOptions o;
  o.min_frames = positive(integer("min_frames"), "min_frames");
  o.max_frames = positive(integer("max_frames"), "max_frames");
  return o;
}

}  // namespace advlm::cli

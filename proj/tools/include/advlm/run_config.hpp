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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "advlm/attack.hpp"
#include "advlm/error.hpp"
#include "advlm/evaluation.hpp"
#include "advlm/pipeline.hpp"

namespace advlm::cli {

// Bad command line or configuration; maps to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class ValueKind { kInt, kUInt, kDouble, kOptionalDouble, kBool, kString, kIntList, kStringList };

struct KeySpec {
  std::string key;
  ValueKind kind;
  std::string default_value;
  std::string help;
};

// Every recognized key in canonical echo order.
const std::vector<KeySpec>& config_keys();
const KeySpec* find_key(std::string_view key);

// Flat key/value run configuration. Values are validated and stored in a
// canonical text form so the echo round-trips exactly.
class RunConfig {
 public:
  RunConfig();

  // TOML-style subset: `key = value` lines, `#` comments, quoted or bare
  // values. Unknown keys, duplicate keys and tables are rejected.
  static RunConfig parse(std::string_view text, const std::string& origin = "<config>");
  static RunConfig load(const std::string& path);

  void set(std::string_view key, std::string_view value);
  // Applies `set` for every line of another config text (used for layering).
  void merge(std::string_view text, const std::string& origin);

  const std::string& raw(std::string_view key) const;
  std::string str(std::string_view key) const { return raw(key); }
  long long integer(std::string_view key) const;
  std::uint64_t u64(std::string_view key) const;
  double real(std::string_view key) const;
  bool flag(std::string_view key) const;
  std::vector<std::string> list(std::string_view key) const;
  std::vector<std::size_t> size_list(std::string_view key) const;

  // Canonical `key = value` text with every key, in config_keys() order.
  std::string dump() const;
  std::uint64_t hash() const;

  AttackConfig attack() const;
  EvalOptions eval_options() const;
  VictimOptions victim_options() const;
  BenchmarkOptions benchmark_options() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace advlm::cli

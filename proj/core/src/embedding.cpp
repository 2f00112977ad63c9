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

#include "advlm/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "advlm/error.hpp"
#include "advlm/rng.hpp"
#include "advlm/toy_vlm.hpp"

namespace advlm {
namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void EmbeddingTable::insert(std::string_view word, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw InvalidArgument("embedding for '" + std::string(word) + "' has " + std::to_string(vec.size()) +
                          " values, expected " + std::to_string(dim_));
  }
  const double n = norm(vec);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidArgument("embedding for '" + std::string(word) + "' is zero or not finite");
  }
  for (double& x : vec) x /= n;
  std::string key(word);
  if (vectors_.count(key) == 0) order_.push_back(key);
  vectors_[key] = std::move(vec);
}

std::vector<double> EmbeddingTable::lookup(std::string_view word) const {
  if (auto it = vectors_.find(std::string(word)); it != vectors_.end()) return it->second;
  Rng rng(fnv1a64(word), 0x6f6f76);
  std::vector<double> v(dim_);
  double n = 0.0;
  while (!(n > 0.0)) {
    for (double& x : v) x = rng.normal();
    n = norm(v);
  }
  for (double& x : v) x /= n;
  return v;
}

bool EmbeddingTable::contains(std::string_view word) const {
  return vectors_.count(std::string(word)) > 0;
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read embedding table " + path);
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingTable> table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> vec;
    double x;
    while (ls >> x) vec.push_back(x);
    if (!ls.eof()) throw IoError(path + ":" + std::to_string(line_no) + ": malformed vector");
    if (!table) table.emplace(vec.size());
    try {
      table->insert(word, std::move(vec));
    } catch (const InvalidArgument& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!table) throw IoError("embedding table " + path + " is empty");
  return std::move(*table);
}

void EmbeddingTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embedding table " + path);
  out << std::setprecision(17);
  for (const auto& w : order_) {
    out << w;
    for (double x : vectors_.at(w)) out << ' ' << x;
    out << '\n';
  }
}

std::vector<double> embed_sentence(std::string_view text, const EmbeddingTable& table) {
  const auto words = split_words(text);
  if (words.empty()) throw InvalidArgument("embed_sentence: text has no words");
  std::vector<double> acc(table.dim(), 0.0);
  for (const auto& w : words) {
    const auto v = table.lookup(w);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  for (double& x : acc) x /= static_cast<double>(words.size());
  const double n = norm(acc);
  if (n > 0.0) {
    for (double& x : acc) x /= n;
  }
  return acc;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("cosine: length mismatch");
  const double na = norm(a), nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double diversity(std::string_view t, std::string_view t_i, const EmbeddingTable& table) {
  return 1.0 - cosine(embed_sentence(t, table), embed_sentence(t_i, table));
}

}  // namespace advlm

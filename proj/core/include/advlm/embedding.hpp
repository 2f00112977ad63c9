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

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace advlm {

// Word vectors standing in for Word2Vec. Every vector handed out has unit L2
// norm; words missing from the table get a unit vector seeded by a hash of
// the word, so lookups never fail and repeat exactly.
class EmbeddingTable {
 public:
  static constexpr std::size_t kDefaultDim = 50;

  explicit EmbeddingTable(std::size_t dim = kDefaultDim) : dim_(dim) {}

  // Stores the normalized vector. Throws on a wrong length or zero vector.
  void insert(std::string_view word, std::vector<double> vec);
  std::vector<double> lookup(std::string_view word) const;
  bool contains(std::string_view word) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return order_.size(); }
  // Words in insertion order.
  const std::vector<std::string>& words() const { return order_; }

  // UTF-8 lines "word v1 ... vN".
  static EmbeddingTable load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::size_t dim_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Normalized mean of the word vectors. Throws InvalidArgument on text with
// no words; returns the zero vector if the word vectors cancel exactly.
std::vector<double> embed_sentence(std::string_view text, const EmbeddingTable& table);

// 1 - cosine similarity of sentence embeddings, in [0, 2].
double diversity(std::string_view t, std::string_view t_i, const EmbeddingTable& table);

// Cosine of two vectors; 0 if either is zero.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace advlm

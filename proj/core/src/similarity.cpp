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

#include "advlm/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "advlm/error.hpp"

namespace advlm {
namespace {

struct Moments {
  double mean_a = 0, mean_b = 0, var_a = 0, var_b = 0, cov = 0;
};

Moments moments(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("similarity: size mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  if (a.empty()) throw InvalidArgument("similarity: empty input");
  const double n = static_cast<double>(a.size());
  Moments m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m.mean_a += a[i];
    m.mean_b += b[i];
  }
  m.mean_a /= n;
  m.mean_b /= n;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - m.mean_a, db = b[i] - m.mean_b;
    m.var_a += da * da;
    m.var_b += db * db;
    m.cov += da * db;
  }
  m.var_a /= n;
  m.var_b /= n;
  m.cov /= n;
  return m;
}

void same_shape(const AttentionMap& a, const AttentionMap& b) {
  if (a.values().shape() != b.values().shape()) {
    throw ShapeError("similarity: map shapes " + shape_str(a.values().shape()) + " and " +
                     shape_str(b.values().shape()) + " differ");
  }
}

}  // namespace

double ssim(std::span<const double> a, std::span<const double> b) {
  const Moments m = moments(a, b);
  const double num = (2.0 * m.mean_a * m.mean_b + kSsimC1) * (2.0 * m.cov + kSsimC2);
  const double den = (m.mean_a * m.mean_a + m.mean_b * m.mean_b + kSsimC1) * (m.var_a + m.var_b + kSsimC2);
  return num / den;
}

double ssim(const AttentionMap& a, const AttentionMap& b) {
  same_shape(a, b);
  return ssim(a.values().data(), b.values().data());
}

bool is_constant(std::span<const double> a) {
  return moments(a, a).var_a < kConstantVariance;
}

double pcc(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2) throw InvalidArgument("pcc: need at least two values");
  const Moments m = moments(a, b);
  if (m.var_a < kConstantVariance || m.var_b < kConstantVariance) return 0.0;
  const double r = m.cov / std::sqrt(m.var_a * m.var_b);
  return std::clamp(r, -1.0, 1.0);
}

double pcc(const AttentionMap& a, const AttentionMap& b) {
  same_shape(a, b);
  return pcc(a.values().data(), b.values().data());
}

double sim(std::span<const double> a, std::span<const double> b) {
  return 0.5 * (ssim(a, b) + pcc(a, b));
}

double sim(const AttentionMap& a, const AttentionMap& b) {
  same_shape(a, b);
  return sim(a.values().data(), b.values().data());
}

AttentionMap mean_map(std::span<const AttentionMap> maps) {
  if (maps.empty()) throw InvalidArgument("mean_map: no maps");
  Tensor acc = maps[0].values();
  for (std::size_t k = 1; k < maps.size(); ++k) {
    same_shape(maps[0], maps[k]);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += maps[k].values()[i];
  }
  const double n = static_cast<double>(maps.size());
  for (double& v : acc.data()) v = std::clamp(v / n, 0.0, 1.0);
  return AttentionMap(std::move(acc));
}

}  // namespace advlm

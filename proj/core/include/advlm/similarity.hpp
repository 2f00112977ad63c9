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

#include <span>

#include "advlm/frames.hpp"

namespace advlm {

inline constexpr double kSsimC1 = 1e-4;  // (0.01 * L)^2, L = 1
inline constexpr double kSsimC2 = 9e-4;  // (0.03 * L)^2
inline constexpr double kConstantVariance = 1e-12;

// Single-window SSIM over the whole map with population statistics.
double ssim(std::span<const double> a, std::span<const double> b);
double ssim(const AttentionMap& a, const AttentionMap& b);

// Pearson correlation of the flattened maps. Returns 0 when either input
// has variance below kConstantVariance.
double pcc(std::span<const double> a, std::span<const double> b);
double pcc(const AttentionMap& a, const AttentionMap& b);
bool is_constant(std::span<const double> a);

// (ssim + pcc) / 2
double sim(std::span<const double> a, std::span<const double> b);
double sim(const AttentionMap& a, const AttentionMap& b);

// Elementwise mean of equal-shape maps.
AttentionMap mean_map(std::span<const AttentionMap> maps);

}  // namespace advlm

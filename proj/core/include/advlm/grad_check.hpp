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

#include <functional>

#include "advlm/autograd.hpp"

namespace advlm {

// Scalar-valued function built on a fresh graph from the leaf it is given.
using ScalarFn = std::function<Var(Graph&, Var)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  Tensor analytic;
  Tensor numeric;
};

// Compares reverse-mode gradients of f at x with central differences.
// Error per coordinate is |analytic - numeric| / max(1, |numeric|).
GradCheckResult grad_check_detailed(const ScalarFn& f, const Tensor& x, double h = 1e-5);
double grad_check(const ScalarFn& f, const Tensor& x, double h = 1e-5);

// Central-difference gradient alone, evaluated without any backward pass.
Tensor numeric_gradient(const ScalarFn& f, const Tensor& x, double h = 1e-5);

}  // namespace advlm

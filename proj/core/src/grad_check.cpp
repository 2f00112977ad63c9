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

#include "advlm/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "advlm/error.hpp"

namespace advlm {
namespace {

double eval_scalar(const ScalarFn& f, const Tensor& x) {
  Graph g;
  Var root = f(g, g.leaf(x, false));
  if (root.value().size() != 1) {
    throw ShapeError("grad_check: function must return a scalar, got " + shape_str(root.shape()));
  }
  return root.value()[0];
}

}  // namespace

Tensor numeric_gradient(const ScalarFn& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("grad_check: step h must be positive");
  Tensor grad(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = eval_scalar(f, probe);
    probe[i] = x[i] - h;
    const double down = eval_scalar(f, probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

GradCheckResult grad_check_detailed(const ScalarFn& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("grad_check: step h must be positive");
  GradCheckResult r;
  {
    Graph g;
    Var leaf = g.leaf(x, true);
    Var root = f(g, leaf);
    if (root.value().size() != 1) {
      throw ShapeError("grad_check: function must return a scalar, got " + shape_str(root.shape()));
    }
    g.backward(root);
    r.analytic = g.grad(leaf);
  }
  r.numeric = numeric_gradient(f, x, h);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double err =
        std::fabs(r.analytic[i] - r.numeric[i]) / std::max(1.0, std::fabs(r.numeric[i]));
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst_index = i;
    }
  }
  return r;
}

double grad_check(const ScalarFn& f, const Tensor& x, double h) {
  return grad_check_detailed(f, x, h).max_rel_error;
}

}  // namespace advlm

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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "advlm/tensor.hpp"

namespace advlm {

class Graph;

// Handle to a node in a Graph. Cheap to copy; only valid while its graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, int id) : graph_(graph), id_(id) {}

  Graph& graph() const { return *graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;

 private:
  Graph* graph_ = nullptr;
  int id_ = -1;
};

// Single-shot reverse-mode tape. Nodes are appended in evaluation order, so
// every parent index is smaller than its child's and the tape is already a
// topological order. backward() may run once per graph.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, int self)>;

  struct Node {
    std::string op;
    Tensor value;
    Tensor grad;  // empty until a gradient reaches this node
    bool requires_grad = false;
    std::vector<int> parents;
    BackwardFn backward;
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var leaf(Tensor value, bool requires_grad = false, std::string name = "leaf");
  Var constant(Tensor value) { return leaf(std::move(value), false, "const"); }

  // Records an op result. Throws NumericError when value is not finite.
  Var record(std::string op, Tensor value, std::vector<int> parents,
             BackwardFn backward);

  void backward(Var root);
  bool consumed() const { return consumed_; }

  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return nodes_.size(); }

  const Tensor& value(Var v) const { return node(v.id()).value; }
  // Gradient of the root w.r.t. v; zeros when nothing flowed into v.
  Tensor grad(Var v) const;

  // Used by backward functions.
  const Tensor& grad_of(int id) const { return nodes_[static_cast<std::size_t>(id)].grad; }
  const Tensor& value_of(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool needs_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
  // Returns the accumulation buffer for node id, allocating zeros on first use.
  Tensor& grad_buffer(int id);

 private:
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

namespace ops {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var neg(Var a);
// [m,k] x [k,n] -> [m,n]
Var matmul(Var a, Var b);
// x[C,H,W], kernel[O,C,kh,kw], bias[O] -> [O,Ho,Wo], zero padding.
Var conv2d(Var x, Var kernel, Var bias, int stride, int pad);
Var relu(Var a);
Var abs(Var a);
// Gradient is zero everywhere.
Var sign(Var a);
// Gradient passes where lo <= x <= hi.
Var clamp(Var a, double lo, double hi);
Var sum(Var a);
Var mean(Var a);
// Rank-2 mean over one axis: [r,c] -> [c] (axis 0) or [r] (axis 1).
Var mean_axis(Var a, int axis);
Var reshape(Var a, Shape shape);
// Concatenates rank-1 tensors.
Var concat(std::span<const Var> parts);
// Stacks equal-shape tensors along a new leading axis.
Var stack(std::span<const Var> parts);
// table[V,d], ids -> [n,d]
Var gather_rows(Var table, std::span<const int> ids);
// Rank-1 log-softmax.
Var log_softmax(Var logits);
// Scalar x[index].
Var pick(Var a, std::size_t index);
// -logp[target] for a rank-1 log-probability vector.
Var nll(Var log_probs, std::size_t target);
// x[in] . W[in,out] + b[out]
Var linear(Var x, Var weight, Var bias);

}  // namespace ops

inline Var operator+(Var a, Var b) { return ops::add(a, b); }
inline Var operator-(Var a, Var b) { return ops::sub(a, b); }
inline Var operator*(Var a, Var b) { return ops::mul(a, b); }
inline Var operator*(double s, Var a) { return ops::scale(a, s); }

}  // namespace advlm

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

#include "advlm/autograd.hpp"

#include <algorithm>
#include <cmath>

#include "advlm/error.hpp"

namespace advlm {

const Tensor& Var::value() const { return graph_->value(*this); }
bool Var::requires_grad() const { return graph_->node(id_).requires_grad; }

Var Graph::leaf(Tensor value, bool requires_grad, std::string name) {
  if (!value.all_finite()) throw NumericError(name + ": non-finite leaf value");
  Node n;
  n.op = std::move(name);
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::record(std::string op, Tensor value, std::vector<int> parents,
                  BackwardFn backward) {
  if (consumed_) throw InvalidArgument(op + ": graph already consumed by backward()");
  if (!value.all_finite()) throw NumericError(op + ": produced non-finite values");
  Node n;
  n.op = std::move(op);
  n.value = std::move(value);
  for (int p : parents) n.requires_grad = n.requires_grad || needs_grad(p);
  n.parents = std::move(parents);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor& Graph::grad_buffer(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.empty()) n.grad = Tensor::zeros(n.value.shape());
  return n.grad;
}

Tensor Graph::grad(Var v) const {
  const Node& n = node(v.id());
  if (n.grad.empty()) return Tensor::zeros(n.value.shape());
  return n.grad;
}

void Graph::backward(Var root) {
  if (consumed_) throw InvalidArgument("backward: graph already consumed");
  const Node& r = node(root.id());
  if (r.value.size() != 1) {
    throw ShapeError("backward: root must be scalar, got " + shape_str(r.value.shape()));
  }
  consumed_ = true;
  if (!r.requires_grad) return;
  grad_buffer(root.id())[0] = 1.0;
  for (int i = root.id(); i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }
  for (const Node& n : nodes_) {
    if (!n.grad.empty() && !n.grad.all_finite()) {
      throw NumericError("backward: non-finite gradient at op " + n.op);
    }
  }
}

namespace ops {
namespace {

void same_graph(const char* op, Var a, Var b) {
  if (&a.graph() != &b.graph()) throw InvalidArgument(std::string(op) + ": operands from different graphs");
}

void same_shape(const char* op, Var a, Var b) {
  same_graph(op, a, b);
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

void expect_rank(const char* op, Var a, std::size_t rank) {
  if (a.shape().size() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(a.shape()));
  }
}

// Applies f elementwise and records a unary op whose local derivative is
// dfdx(x, y).
template <typename F, typename D>
Var unary(const char* name, Var a, F f, D dfdx) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  int ia = a.id();
  return a.graph().record(name, std::move(y), {ia}, [ia, dfdx](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const Tensor& x = g.value_of(ia);
    const Tensor& y = g.value_of(self);
    const Tensor& gy = g.grad_of(self);
    Tensor& gx = g.grad_buffer(ia);
    for (std::size_t i = 0; i < x.size(); ++i) gx[i] += gy[i] * dfdx(x[i], y[i]);
  });
}

}  // namespace

Var add(Var a, Var b) {
  same_shape("add", a, b);
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + z[i];
  int ia = a.id(), ib = b.id();
  return a.graph().record("add", std::move(y), {ia, ib}, [ia, ib](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    for (int p : {ia, ib}) {
      if (!g.needs_grad(p)) continue;
      Tensor& gp = g.grad_buffer(p);
      for (std::size_t i = 0; i < gy.size(); ++i) gp[i] += gy[i];
    }
  });
}

Var sub(Var a, Var b) {
  same_shape("sub", a, b);
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - z[i];
  int ia = a.id(), ib = b.id();
  return a.graph().record("sub", std::move(y), {ia, ib}, [ia, ib](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    if (g.needs_grad(ia)) {
      Tensor& ga = g.grad_buffer(ia);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
    }
    if (g.needs_grad(ib)) {
      Tensor& gb = g.grad_buffer(ib);
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] -= gy[i];
    }
  });
}

Var mul(Var a, Var b) {
  same_shape("mul", a, b);
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * z[i];
  int ia = a.id(), ib = b.id();
  return a.graph().record("mul", std::move(y), {ia, ib}, [ia, ib](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    if (g.needs_grad(ia)) {
      const Tensor& z = g.value_of(ib);
      Tensor& ga = g.grad_buffer(ia);
      for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * z[i];
    }
    if (g.needs_grad(ib)) {
      const Tensor& x = g.value_of(ia);
      Tensor& gb = g.grad_buffer(ib);
      for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * x[i];
    }
  });
}

Var scale(Var a, double factor) {
  if (!std::isfinite(factor)) throw NumericError("scale: non-finite factor");
  return unary(
      "scale", a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Var neg(Var a) { return scale(a, -1.0); }

Var matmul(Var a, Var b) {
  same_graph("matmul", a, b);
  expect_rank("matmul", a, 2);
  expect_rank("matmul", b, 2);
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) {
    throw ShapeError("matmul: inner dims differ " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
  const Tensor& x = a.value();
  const Tensor& w = b.value();
  Tensor y({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double xv = x[i * k + p];
      for (std::size_t j = 0; j < n; ++j) y[i * n + j] += xv * w[p * n + j];
    }
  }
  int ia = a.id(), ib = b.id();
  return a.graph().record("matmul", std::move(y), {ia, ib}, [ia, ib, m, k, n](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    if (g.needs_grad(ia)) {
      const Tensor& w = g.value_of(ib);
      Tensor& ga = g.grad_buffer(ia);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += gy[i * n + j] * w[p * n + j];
          ga[i * k + p] += acc;
        }
    }
    if (g.needs_grad(ib)) {
      const Tensor& x = g.value_of(ia);
      Tensor& gb = g.grad_buffer(ib);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double xv = x[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += xv * gy[i * n + j];
        }
    }
  });
}

Var conv2d(Var x, Var kernel, Var bias, int stride, int pad) {
  same_graph("conv2d", x, kernel);
  same_graph("conv2d", x, bias);
  expect_rank("conv2d", x, 3);
  expect_rank("conv2d", kernel, 4);
  expect_rank("conv2d", bias, 1);
  if (stride < 1 || pad < 0) throw InvalidArgument("conv2d: stride must be >= 1 and pad >= 0");
  const auto& xs = x.shape();
  const auto& ks = kernel.shape();
  const int C = static_cast<int>(xs[0]), H = static_cast<int>(xs[1]), W = static_cast<int>(xs[2]);
  const int O = static_cast<int>(ks[0]), KH = static_cast<int>(ks[2]), KW = static_cast<int>(ks[3]);
  if (static_cast<int>(ks[1]) != C || static_cast<int>(bias.shape()[0]) != O) {
    throw ShapeError("conv2d: input " + shape_str(xs) + " incompatible with kernel " +
                     shape_str(ks) + " and bias " + shape_str(bias.shape()));
  }
  if (H + 2 * pad < KH || W + 2 * pad < KW) {
    throw ShapeError("conv2d: kernel " + shape_str(ks) + " larger than padded input " + shape_str(xs));
  }
  const int HO = (H + 2 * pad - KH) / stride + 1;
  const int WO = (W + 2 * pad - KW) / stride + 1;
  const Tensor& in = x.value();
  const Tensor& w = kernel.value();
  const Tensor& b = bias.value();
  Tensor y({static_cast<std::size_t>(O), static_cast<std::size_t>(HO), static_cast<std::size_t>(WO)});
  for (int o = 0; o < O; ++o) {
    double* out = &y[static_cast<std::size_t>(o * HO * WO)];
    for (int i = 0; i < HO * WO; ++i) out[i] = b[static_cast<std::size_t>(o)];
    for (int c = 0; c < C; ++c) {
      const double* src = &in[static_cast<std::size_t>(c * H * W)];
      const double* wk = &w[static_cast<std::size_t>((o * C + c) * KH * KW)];
      for (int oy = 0; oy < HO; ++oy) {
        for (int ky = 0; ky < KH; ++ky) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= H) continue;
          for (int ox = 0; ox < WO; ++ox) {
            double acc = 0.0;
            for (int kx = 0; kx < KW; ++kx) {
              const int ix = ox * stride - pad + kx;
              if (ix < 0 || ix >= W) continue;
              acc += wk[ky * KW + kx] * src[iy * W + ix];
            }
            out[oy * WO + ox] += acc;
          }
        }
      }
    }
  }
  int ix_id = x.id(), ik = kernel.id(), ib = bias.id();
  return x.graph().record(
      "conv2d", std::move(y), {ix_id, ik, ib},
      [=](Graph& g, int self) {
        const Tensor& gy = g.grad_of(self);
        const Tensor& in = g.value_of(ix_id);
        const Tensor& w = g.value_of(ik);
        const bool need_x = g.needs_grad(ix_id), need_w = g.needs_grad(ik);
        Tensor* gx = need_x ? &g.grad_buffer(ix_id) : nullptr;
        Tensor* gw = need_w ? &g.grad_buffer(ik) : nullptr;
        if (g.needs_grad(ib)) {
          Tensor& gb = g.grad_buffer(ib);
          for (int o = 0; o < O; ++o) {
            double acc = 0.0;
            for (int i = 0; i < HO * WO; ++i) acc += gy[static_cast<std::size_t>(o * HO * WO + i)];
            gb[static_cast<std::size_t>(o)] += acc;
          }
        }
        if (!need_x && !need_w) return;
        for (int o = 0; o < O; ++o) {
          const double* go = &gy[static_cast<std::size_t>(o * HO * WO)];
          for (int c = 0; c < C; ++c) {
            const double* src = &in[static_cast<std::size_t>(c * H * W)];
            const double* wk = &w[static_cast<std::size_t>((o * C + c) * KH * KW)];
            double* gsrc = need_x ? &(*gx)[static_cast<std::size_t>(c * H * W)] : nullptr;
            double* gwk = need_w ? &(*gw)[static_cast<std::size_t>((o * C + c) * KH * KW)] : nullptr;
            for (int oy = 0; oy < HO; ++oy) {
              for (int ky = 0; ky < KH; ++ky) {
                const int iy = oy * stride - pad + ky;
                if (iy < 0 || iy >= H) continue;
                for (int ox = 0; ox < WO; ++ox) {
                  const double gv = go[oy * WO + ox];
                  for (int kx = 0; kx < KW; ++kx) {
                    const int ix = ox * stride - pad + kx;
                    if (ix < 0 || ix >= W) continue;
                    if (gsrc) gsrc[iy * W + ix] += wk[ky * KW + kx] * gv;
                    if (gwk) gwk[ky * KW + kx] += src[iy * W + ix] * gv;
                  }
                }
              }
            }
          }
        }
      });
}

Var relu(Var a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var abs(Var a) {
  return unary(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var sign(Var a) {
  return unary(
      "sign", a, [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); },
      [](double, double) { return 0.0; });
}

Var clamp(Var a, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgument("clamp: lo must not exceed hi");
  return unary(
      "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var sum(Var a) {
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.data()) s += v;
  int ia = a.id();
  return a.graph().record("sum", Tensor::scalar(s), {ia}, [ia](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const double gy = g.grad_of(self)[0];
    Tensor& gx = g.grad_buffer(ia);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy;
  });
}

Var mean(Var a) {
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.data()) s += v;
  const double n = static_cast<double>(x.size());
  int ia = a.id();
  return a.graph().record("mean", Tensor::scalar(s / n), {ia}, [ia, n](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const double gy = g.grad_of(self)[0] / n;
    Tensor& gx = g.grad_buffer(ia);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy;
  });
}

Var mean_axis(Var a, int axis) {
  expect_rank("mean_axis", a, 2);
  if (axis != 0 && axis != 1) throw InvalidArgument("mean_axis: axis must be 0 or 1");
  const std::size_t r = a.shape()[0], c = a.shape()[1];
  const Tensor& x = a.value();
  Tensor y(Shape{axis == 0 ? c : r});
  if (axis == 0) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) y[j] += x[i * c + j];
    for (std::size_t j = 0; j < c; ++j) y[j] /= static_cast<double>(r);
  } else {
    for (std::size_t i = 0; i < r; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < c; ++j) s += x[i * c + j];
      y[i] = s / static_cast<double>(c);
    }
  }
  int ia = a.id();
  return a.graph().record("mean_axis", std::move(y), {ia}, [ia, axis, r, c](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const Tensor& gy = g.grad_of(self);
    Tensor& gx = g.grad_buffer(ia);
    const double inv = 1.0 / static_cast<double>(axis == 0 ? r : c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += gy[axis == 0 ? j : i] * inv;
  });
}

Var reshape(Var a, Shape shape) {
  Tensor y = a.value().reshaped(std::move(shape));
  int ia = a.id();
  return a.graph().record("reshape", std::move(y), {ia}, [ia](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const Tensor& gy = g.grad_of(self);
    Tensor& gx = g.grad_buffer(ia);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidArgument("concat: no inputs");
  std::vector<double> data;
  std::vector<int> ids;
  for (Var p : parts) {
    same_graph("concat", parts[0], p);
    expect_rank("concat", p, 1);
    const auto& v = p.value().values();
    data.insert(data.end(), v.begin(), v.end());
    ids.push_back(p.id());
  }
  Tensor y = Tensor::vector(std::move(data));
  return parts[0].graph().record("concat", std::move(y), ids, [ids](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    std::size_t offset = 0;
    for (int p : ids) {
      const std::size_t n = g.value_of(p).size();
      if (g.needs_grad(p)) {
        Tensor& gp = g.grad_buffer(p);
        for (std::size_t i = 0; i < n; ++i) gp[i] += gy[offset + i];
      }
      offset += n;
    }
  });
}

Var stack(std::span<const Var> parts) {
  if (parts.empty()) throw InvalidArgument("stack: no inputs");
  const Shape& inner = parts[0].shape();
  std::vector<double> data;
  std::vector<int> ids;
  for (Var p : parts) {
    same_graph("stack", parts[0], p);
    if (p.shape() != inner) {
      throw ShapeError("stack: shape mismatch " + shape_str(inner) + " vs " + shape_str(p.shape()));
    }
    const auto& v = p.value().values();
    data.insert(data.end(), v.begin(), v.end());
    ids.push_back(p.id());
  }
  Shape shape{parts.size()};
  shape.insert(shape.end(), inner.begin(), inner.end());
  Tensor y(std::move(shape), std::move(data));
  const std::size_t n = shape_numel(inner);
  return parts[0].graph().record("stack", std::move(y), ids, [ids, n](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!g.needs_grad(ids[k])) continue;
      Tensor& gp = g.grad_buffer(ids[k]);
      for (std::size_t i = 0; i < n; ++i) gp[i] += gy[k * n + i];
    }
  });
}

Var gather_rows(Var table, std::span<const int> ids) {
  expect_rank("gather_rows", table, 2);
  if (ids.empty()) throw InvalidArgument("gather_rows: empty id list");
  const std::size_t rows = table.shape()[0], d = table.shape()[1];
  const Tensor& t = table.value();
  Tensor y({ids.size(), d});
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || static_cast<std::size_t>(ids[k]) >= rows) {
      throw InvalidArgument("gather_rows: id " + std::to_string(ids[k]) + " outside table of " +
                            std::to_string(rows) + " rows");
    }
    std::copy_n(&t[static_cast<std::size_t>(ids[k]) * d], d, &y[k * d]);
  }
  std::vector<int> idv(ids.begin(), ids.end());
  int it = table.id();
  return table.graph().record("gather_rows", std::move(y), {it}, [it, idv, d](Graph& g, int self) {
    if (!g.needs_grad(it)) return;
    const Tensor& gy = g.grad_of(self);
    Tensor& gt = g.grad_buffer(it);
    for (std::size_t k = 0; k < idv.size(); ++k)
      for (std::size_t j = 0; j < d; ++j) gt[static_cast<std::size_t>(idv[k]) * d + j] += gy[k * d + j];
  });
}

Var log_softmax(Var logits) {
  expect_rank("log_softmax", logits, 1);
  const Tensor& x = logits.value();
  double m = x[0];
  for (double v : x.data()) m = std::max(m, v);
  double s = 0.0;
  for (double v : x.data()) s += std::exp(v - m);
  const double lse = m + std::log(s);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - lse;
  int ia = logits.id();
  return logits.graph().record("log_softmax", std::move(y), {ia}, [ia](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    const Tensor& y = g.value_of(self);
    const Tensor& gy = g.grad_of(self);
    double total = 0.0;
    for (double v : gy.data()) total += v;
    Tensor& gx = g.grad_buffer(ia);
    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += gy[i] - std::exp(y[i]) * total;
  });
}

Var pick(Var a, std::size_t index) {
  if (index >= a.value().size()) {
    throw InvalidArgument("pick: index " + std::to_string(index) + " outside " + shape_str(a.shape()));
  }
  int ia = a.id();
  return a.graph().record("pick", Tensor::scalar(a.value()[index]), {ia}, [ia, index](Graph& g, int self) {
    if (!g.needs_grad(ia)) return;
    g.grad_buffer(ia)[index] += g.grad_of(self)[0];
  });
}

Var nll(Var log_probs, std::size_t target) {
  expect_rank("nll", log_probs, 1);
  return neg(pick(log_probs, target));
}

Var linear(Var x, Var weight, Var bias) {
  same_graph("linear", x, weight);
  same_graph("linear", x, bias);
  expect_rank("linear", x, 1);
  expect_rank("linear", weight, 2);
  expect_rank("linear", bias, 1);
  const std::size_t in = weight.shape()[0], out = weight.shape()[1];
  if (x.shape()[0] != in || bias.shape()[0] != out) {
    throw ShapeError("linear: input " + shape_str(x.shape()) + ", weight " + shape_str(weight.shape()) +
                     ", bias " + shape_str(bias.shape()));
  }
  const Tensor& xv = x.value();
  const Tensor& w = weight.value();
  Tensor y = bias.value();
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = xv[i];
    for (std::size_t j = 0; j < out; ++j) y[j] += xi * w[i * out + j];
  }
  int ix = x.id(), iw = weight.id(), ib = bias.id();
  return x.graph().record("linear", std::move(y), {ix, iw, ib}, [=](Graph& g, int self) {
    const Tensor& gy = g.grad_of(self);
    if (g.needs_grad(ix)) {
      const Tensor& w = g.value_of(iw);
      Tensor& gx = g.grad_buffer(ix);
      for (std::size_t i = 0; i < in; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < out; ++j) acc += w[i * out + j] * gy[j];
        gx[i] += acc;
      }
    }
    if (g.needs_grad(iw)) {
      const Tensor& xv = g.value_of(ix);
      Tensor& gw = g.grad_buffer(iw);
      for (std::size_t i = 0; i < in; ++i)
        for (std::size_t j = 0; j < out; ++j) gw[i * out + j] += xv[i] * gy[j];
    }
    if (g.needs_grad(ib)) {
      Tensor& gb = g.grad_buffer(ib);
      for (std::size_t j = 0; j < out; ++j) gb[j] += gy[j];
    }
  });
}

}  // namespace ops
}  // namespace advlm

// Copyright 2026 The advpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advpriv/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advpriv/errors.hpp"
#include "advpriv/kernels.hpp"
#include "advpriv/rng.hpp"

namespace advpriv {

namespace {

Shape vec(int n) { return Shape{n, 1}; }

void require_same(const Shape& a, const Shape& b, const char* op) {
  if (a != b) {
    throw InvalidShapeError(std::string(op) + ": shape mismatch " +
                            to_string(a) + " vs " + to_string(b));
  }
}

double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

}  // namespace

Var Tape::push(Node n) {
  if (n.op != Op::kParam) {
    n.offset = values_.size();
    values_.resize(values_.size() + n.shape.size(), 0.0);
  }
  nodes_.push_back(n);
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw ContractViolation("variable does not belong to this tape");
  }
  return nodes_[v.id];
}

double* Tape::mutable_value(int id) { return values_.data() + nodes_[id].offset; }

const double* Tape::value_ptr(int id) const {
  const Node& n = nodes_[id];
  if (n.op == Op::kParam) return n.param->value.data.data();
  return values_.data() + n.offset;
}

double* Tape::grad_ptr(int id) {
  Node& n = nodes_[id];
  touched_[id] = 1;
  if (n.op == Op::kParam) return n.param->grad.data();
  return grads_.data() + n.offset;
}

std::span<const double> Tape::value(Var v) const {
  const Node& n = node(v);
  return {value_ptr(v.id), n.shape.size()};
}

double Tape::scalar_value(Var v) const {
  const Node& n = node(v);
  if (!n.shape.is_scalar()) {
    throw InvalidShapeError("expected a scalar, got " + to_string(n.shape));
  }
  return *value_ptr(v.id);
}

std::span<const double> Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.op == Op::kParam || grads_.size() < values_.size()) return {};
  return {grads_.data() + n.offset, n.shape.size()};
}

Var Tape::input(std::span<const double> values, Shape shape) {
  if (shape.rows <= 0 || shape.cols <= 0 || values.size() != shape.size()) {
    throw InvalidShapeError("input of shape " + to_string(shape) + " given " +
                            std::to_string(values.size()) + " values");
  }
  Node n;
  n.op = Op::kInput;
  n.shape = shape;
  Var v = push(n);
  std::copy(values.begin(), values.end(), mutable_value(v.id));
  return v;
}

Var Tape::input(std::span<const double> values) {
  return input(values, vec(static_cast<int>(values.size())));
}

Var Tape::scalar(double value) { return input(std::span(&value, 1)); }

Var Tape::param(Parameter& p, Grad mode) {
  Node n;
  n.op = Op::kParam;
  n.shape = p.shape();
  n.param = &p;
  n.requires_grad = mode == Grad::kAccumulate;
  return push(n);
}

Var Tape::param(const Parameter& p) {
  // Frozen leaves never write through the pointer.
  return param(const_cast<Parameter&>(p), Grad::kFrozen);
}

Var Tape::row(Parameter& table, int index, Grad mode) {
  const Shape& s = table.shape();
  if (index < 0 || index >= s.rows) {
    throw IndexError("row " + std::to_string(index) + " out of range for " +
                     table.name + " with " + std::to_string(s.rows) + " rows");
  }
  Node n;
  n.op = Op::kRow;
  n.shape = vec(s.cols);
  n.param = &table;
  n.index = index;
  n.requires_grad = mode == Grad::kAccumulate;
  Var v = push(n);
  const double* src =
      table.value.data.data() + static_cast<std::size_t>(index) * s.cols;
  std::copy(src, src + s.cols, mutable_value(v.id));
  return v;
}

Var Tape::detach(Var v) {
  const Shape s = node(v).shape;
  Node n;
  n.op = Op::kInput;
  n.shape = s;
  Var out = push(n);
  const double* src = value_ptr(v.id);
  std::copy(src, src + s.size(), mutable_value(out.id));
  return out;
}

Var Tape::matvec(Var w, Var x) {
  const Shape ws = node(w).shape;
  const Shape xs = node(x).shape;
  if (xs.cols != 1 || xs.rows != ws.cols) {
    throw InvalidShapeError("matvec: " + to_string(ws) + " times " +
                            to_string(xs));
  }
  Node n;
  n.op = Op::kMatVec;
  n.shape = vec(ws.rows);
  n.a = w.id;
  n.b = x.id;
  n.requires_grad = nodes_[w.id].requires_grad || nodes_[x.id].requires_grad;
  Var out = push(n);
  kernels::matvec({value_ptr(w.id), ws.size()}, ws.rows, ws.cols,
                  {value_ptr(x.id), xs.size()},
                  {mutable_value(out.id), static_cast<std::size_t>(ws.rows)});
  return out;
}

Var Tape::add(Var a, Var b) {
  require_same(node(a).shape, node(b).shape, "add");
  Node n;
  n.op = Op::kAdd;
  n.shape = nodes_[a.id].shape;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  Var out = push(n);
  const double* pa = value_ptr(a.id);
  const double* pb = value_ptr(b.id);
  double* o = mutable_value(out.id);
  for (std::size_t i = 0; i < n.shape.size(); ++i) o[i] = pa[i] + pb[i];
  return out;
}

Var Tape::sub(Var a, Var b) {
  require_same(node(a).shape, node(b).shape, "sub");
  Node n;
  n.op = Op::kSub;
  n.shape = nodes_[a.id].shape;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  Var out = push(n);
  const double* pa = value_ptr(a.id);
  const double* pb = value_ptr(b.id);
  double* o = mutable_value(out.id);
  for (std::size_t i = 0; i < n.shape.size(); ++i) o[i] = pa[i] - pb[i];
  return out;
}

Var Tape::mul(Var a, Var b) {
  require_same(node(a).shape, node(b).shape, "mul");
  Node n;
  n.op = Op::kMul;
  n.shape = nodes_[a.id].shape;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  Var out = push(n);
  const double* pa = value_ptr(a.id);
  const double* pb = value_ptr(b.id);
  double* o = mutable_value(out.id);
  for (std::size_t i = 0; i < n.shape.size(); ++i) o[i] = pa[i] * pb[i];
  return out;
}

Var Tape::scale(Var a, double c) {
  Node n;
  n.op = Op::kScale;
  n.shape = node(a).shape;
  n.a = a.id;
  n.constant = c;
  n.requires_grad = nodes_[a.id].requires_grad;
  Var out = push(n);
  const double* pa = value_ptr(a.id);
  double* o = mutable_value(out.id);
  for (std::size_t i = 0; i < n.shape.size(); ++i) o[i] = c * pa[i];
  return out;
}

Var Tape::unary(Op op, Var a, Shape shape) {
  Node n;
  n.op = op;
  n.shape = shape;
  n.a = a.id;
  n.requires_grad = node(a).requires_grad;
  return push(n);
}

Var Tape::sigmoid(Var a) {
  Var out = unary(Op::kSigmoid, a, node(a).shape);
  const double* pa = value_ptr(a.id);
  double* o = mutable_value(out.id);
  for (std::size_t i = 0; i < nodes_[out.id].shape.size(); ++i) {
    o[i] = advpriv::sigmoid(pa[i]);
  }
  return out;
}

Var Tape::tanh(Var a) {
  Var out = unary(Op::kTanh, a, node(a).shape);
  const double* pa = value_ptr(a.id);
  double* o = mutable_value(out.id);
  for (std::size_t i = 0; i < nodes_[out.id].shape.size(); ++i) {
    o[i] = std::tanh(pa[i]);
  }
  return out;
}

Var Tape::relu(Var a) {
  Var out = unary(Op::kRelu, a, node(a).shape);
  const double* pa = value_ptr(a.id);
  double* o = mutable_value(out.id);
  for (std::size_t i = 0; i < nodes_[out.id].shape.size(); ++i) {
    o[i] = pa[i] > 0.0 ? pa[i] : 0.0;
    record_kink(pa[i] > 0.0);
  }
  return out;
}

Var Tape::softmax(Var a) {
  const Shape s = node(a).shape;
  Var out = unary(Op::kSoftmax, a, s);
  const std::vector<double> p = advpriv::softmax({value_ptr(a.id), s.size()});
  std::copy(p.begin(), p.end(), mutable_value(out.id));
  return out;
}

Var Tape::slice(Var a, int offset, int length) {
  const Shape s = node(a).shape;
  if (s.cols != 1 || offset < 0 || length <= 0 || offset + length > s.rows) {
    throw InvalidShapeError("slice [" + std::to_string(offset) + ", +" +
                            std::to_string(length) + ") of " + to_string(s));
  }
  Var out = unary(Op::kSlice, a, vec(length));
  nodes_[out.id].index = offset;
  const double* pa = value_ptr(a.id) + offset;
  std::copy(pa, pa + length, mutable_value(out.id));
  return out;
}

Var Tape::sum(Var a) {
  const Shape s = node(a).shape;
  Var out = unary(Op::kSum, a, vec(1));
  const double* pa = value_ptr(a.id);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += pa[i];
  *mutable_value(out.id) = acc;
  return out;
}

Var Tape::dropout(Var a, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw InvalidInputError("dropout rate must be in [0, 1)");
  }
  if (rate == 0.0) return a;
  stochastic_ = true;
  const Shape s = node(a).shape;
  std::vector<double> mask(s.size());
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& m : mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
  return mul(a, input(mask, s));
}

Var Tape::nll_categorical(Var logits, int label) {
  const Shape s = node(logits).shape;
  if (s.cols != 1) throw InvalidShapeError("nll_categorical expects a vector");
  if (label < 0 || label >= s.rows) {
    throw IndexError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(s.rows) + " classes");
  }
  Var out = unary(Op::kNllCategorical, logits, vec(1));
  Node& n = nodes_[out.id];
  n.index = label;
  n.aux_offset = aux_.size();
  const std::vector<double> p =
      advpriv::softmax({value_ptr(logits.id), s.size()});
  aux_.insert(aux_.end(), p.begin(), p.end());
  *mutable_value(out.id) =
      advpriv::nll_categorical({value_ptr(logits.id), s.size()}, label);
  return out;
}

Var Tape::nll_multilabel(Var probs, std::span<const int> targets) {
  const Shape s = node(probs).shape;
  if (s.cols != 1 || static_cast<std::size_t>(s.rows) != targets.size()) {
    throw InvalidShapeError("nll_multilabel: " + std::to_string(targets.size()) +
                            " targets for probabilities " + to_string(s));
  }
  Var out = unary(Op::kNllMultilabel, probs, vec(1));
  nodes_[out.id].aux_offset = aux_.size();
  for (int t : targets) aux_.push_back(t != 0 ? 1.0 : 0.0);
  const double* p = value_ptr(probs.id);
  for (std::size_t i = 0; i < s.size(); ++i) {
    record_kink(p[i] < kProbClamp ? 0 : (p[i] > 1.0 - kProbClamp ? 2 : 1));
  }
  *mutable_value(out.id) =
      advpriv::nll_multilabel({value_ptr(probs.id), s.size()}, targets);
  return out;
}

Var Tape::squared_distance(Var a, Var b) {
  require_same(node(a).shape, node(b).shape, "squared_distance");
  Node n;
  n.op = Op::kSquaredDistance;
  n.shape = vec(1);
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  Var out = push(n);
  const double* pa = value_ptr(a.id);
  const double* pb = value_ptr(b.id);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_[a.id].shape.size(); ++i) {
    const double d = pa[i] - pb[i];
    acc += d * d;
  }
  *mutable_value(out.id) = acc;
  return out;
}

void Tape::backward(Var loss, double seed) {
  const Node& root = node(loss);
  if (!root.shape.is_scalar()) {
    throw ContractViolation("backward requires a scalar loss, got " +
                            to_string(root.shape));
  }
  grads_.assign(values_.size(), 0.0);
  touched_.assign(nodes_.size(), 0);
  if (!root.requires_grad) return;
  *grad_ptr(loss.id) += seed;

  for (int id = loss.id; id >= 0; --id) {
    if (!touched_[id]) continue;
    const Node& n = nodes_[id];
    if (!n.requires_grad) continue;
    const std::size_t size = n.shape.size();
    const double* g = n.op == Op::kParam ? nullptr : grads_.data() + n.offset;
    const double* y = n.op == Op::kParam ? nullptr : values_.data() + n.offset;
    const bool ga = n.a >= 0 && nodes_[n.a].requires_grad;
    const bool gb = n.b >= 0 && nodes_[n.b].requires_grad;

    switch (n.op) {
      case Op::kInput:
      case Op::kParam:
        break;
      case Op::kRow: {
        const int cols = n.param->shape().cols;
        double* dst =
            n.param->grad.data() + static_cast<std::size_t>(n.index) * cols;
        for (int j = 0; j < cols; ++j) dst[j] += g[j];
        break;
      }
      case Op::kMatVec: {
        const Shape ws = nodes_[n.a].shape;
        if (gb) {
          kernels::matvec_transpose_acc(
              {value_ptr(n.a), ws.size()}, ws.rows, ws.cols, {g, size},
              {grad_ptr(n.b), static_cast<std::size_t>(ws.cols)});
        }
        if (ga) {
          kernels::outer_acc({g, size},
                             {value_ptr(n.b), static_cast<std::size_t>(ws.cols)},
                             ws.rows, ws.cols, {grad_ptr(n.a), ws.size()});
        }
        break;
      }
      case Op::kAdd:
      case Op::kSub: {
        const double sign = n.op == Op::kAdd ? 1.0 : -1.0;
        if (ga) {
          double* da = grad_ptr(n.a);
          for (std::size_t i = 0; i < size; ++i) da[i] += g[i];
        }
        if (gb) {
          double* db = grad_ptr(n.b);
          for (std::size_t i = 0; i < size; ++i) db[i] += sign * g[i];
        }
        break;
      }
      case Op::kMul: {
        const double* va = value_ptr(n.a);
        const double* vb = value_ptr(n.b);
        if (ga) {
          double* da = grad_ptr(n.a);
          for (std::size_t i = 0; i < size; ++i) da[i] += g[i] * vb[i];
        }
        if (gb) {
          double* db = grad_ptr(n.b);
          for (std::size_t i = 0; i < size; ++i) db[i] += g[i] * va[i];
        }
        break;
      }
      case Op::kScale: {
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < size; ++i) da[i] += n.constant * g[i];
        break;
      }
      case Op::kSigmoid: {
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < size; ++i) {
          da[i] += g[i] * y[i] * (1.0 - y[i]);
        }
        break;
      }
      case Op::kTanh: {
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < size; ++i) {
          da[i] += g[i] * (1.0 - y[i] * y[i]);
        }
        break;
      }
      case Op::kRelu: {
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < size; ++i) {
          if (y[i] > 0.0) da[i] += g[i];
        }
        break;
      }
      case Op::kSoftmax: {
        double dot = 0.0;
        for (std::size_t i = 0; i < size; ++i) dot += g[i] * y[i];
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < size; ++i) da[i] += y[i] * (g[i] - dot);
        break;
      }
      case Op::kSlice: {
        double* da = grad_ptr(n.a) + n.index;
        for (std::size_t i = 0; i < size; ++i) da[i] += g[i];
        break;
      }
      case Op::kSum: {
        const std::size_t in = nodes_[n.a].shape.size();
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < in; ++i) da[i] += g[0];
        break;
      }
      case Op::kNllCategorical: {
        const std::size_t in = nodes_[n.a].shape.size();
        const double* p = aux_.data() + n.aux_offset;
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < in; ++i) {
          da[i] += g[0] * (p[i] - (static_cast<int>(i) == n.index ? 1.0 : 0.0));
        }
        break;
      }
      case Op::kNllMultilabel: {
        const std::size_t in = nodes_[n.a].shape.size();
        const double* z = aux_.data() + n.aux_offset;
        const double* p = value_ptr(n.a);
        double* da = grad_ptr(n.a);
        for (std::size_t i = 0; i < in; ++i) {
          // The clamp is flat outside its range.
          if (p[i] < kProbClamp || p[i] > 1.0 - kProbClamp) continue;
          da[i] += g[0] * (-z[i] / p[i] + (1.0 - z[i]) / (1.0 - p[i]));
        }
        break;
      }
      case Op::kSquaredDistance: {
        const std::size_t in = nodes_[n.a].shape.size();
        const double* va = value_ptr(n.a);
        const double* vb = value_ptr(n.b);
        double* da = ga ? grad_ptr(n.a) : nullptr;
        double* db = gb ? grad_ptr(n.b) : nullptr;
        for (std::size_t i = 0; i < in; ++i) {
          const double d = 2.0 * g[0] * (va[i] - vb[i]);
          if (da) da[i] += d;
          if (db) db[i] -= d;
        }
        break;
      }
    }
  }
}

std::vector<double> softmax(std::span<const double> v) {
  if (v.empty()) throw InvalidShapeError("softmax of an empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> sigmoid(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
  return out;
}

double nll_categorical(std::span<const double> logits, int label) {
  if (logits.empty()) throw InvalidShapeError("nll_categorical: no logits");
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw IndexError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double x : logits) total += std::exp(x - m);
  const double loss = -(logits[label] - m - std::log(total));
  return std::max(loss, 0.0);
}

double nll_multilabel(std::span<const double> probs,
                      std::span<const int> targets) {
  if (probs.size() != targets.size()) {
    throw InvalidShapeError("nll_multilabel: " + std::to_string(probs.size()) +
                            " probabilities for " +
                            std::to_string(targets.size()) + " targets");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    loss -= targets[i] != 0 ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

}  // namespace advpriv

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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "advpriv/tensor.hpp"

namespace advpriv {

class Rng;

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside the
// likelihood ops before taking logs.
inline constexpr double kProbClamp = 1e-7;

// Whether a parameter leaf accumulates gradient into Parameter::grad.
// Frozen leaves still pass gradient through to their consumers' other inputs.
enum class Grad { kAccumulate, kFrozen };

// Handle to a node on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Define-by-run reverse-mode tape. Nodes are appended in creation order,
// which is therefore a topological order. Values live in a flat arena;
// parameter leaves alias the Parameter storage directly.
//
// A parameter must not be modified between the creation of a node that
// reads it and a backward pass through that node.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Leaves.
  Var input(std::span<const double> values, Shape shape);
  Var input(std::span<const double> values);
  Var scalar(double value);
  Var param(Parameter& p, Grad mode = Grad::kAccumulate);
  Var param(const Parameter& p);  // always frozen
  // Row `index` of a matrix parameter, as a column vector.
  Var row(Parameter& table, int index, Grad mode = Grad::kAccumulate);
  // Copy of v's value with no gradient path back to v.
  Var detach(Var v);

  // Arithmetic.
  Var matvec(Var w, Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var softmax(Var a);
  Var slice(Var a, int offset, int length);
  Var sum(Var a);
  // Inverted dropout on a vector: keeps each unit with probability 1 - rate
  // and scales survivors by 1 / (1 - rate). Marks the tape as stochastic.
  Var dropout(Var a, double rate, Rng& rng);

  // Losses (scalar outputs).
  Var nll_categorical(Var logits, int label);
  Var nll_multilabel(Var probs, std::span<const int> targets);
  Var squared_distance(Var a, Var b);

  std::span<const double> value(Var v) const;
  double scalar_value(Var v) const;
  const Shape& shape(Var v) const { return nodes_.at(v.id).shape; }
  // Gradient of the last backward() root w.r.t. v (empty for param leaves,
  // whose gradient lives in Parameter::grad).
  std::span<const double> grad(Var v) const;

  // Accumulates d(seed * loss)/d(param) into every non-frozen parameter
  // reachable from `loss`. Throws ContractViolation for a non-scalar loss.
  void backward(Var loss, double seed = 1.0);

  std::size_t num_nodes() const { return nodes_.size(); }
  bool stochastic() const { return stochastic_; }
  // Hash of which side of every non-differentiable point (ReLU at zero,
  // probability clamp bounds) the forward pass landed on.
  std::uint64_t kink_signature() const { return kink_signature_; }

 private:
  enum class Op : std::uint8_t {
    kInput,
    kParam,
    kRow,
    kMatVec,
    kAdd,
    kSub,
    kMul,
    kScale,
    kSigmoid,
    kTanh,
    kRelu,
    kSoftmax,
    kSlice,
    kSum,
    kNllCategorical,
    kNllMultilabel,
    kSquaredDistance,
  };

  struct Node {
    Op op = Op::kInput;
    Shape shape;
    int a = -1;
    int b = -1;
    std::size_t offset = 0;      // value offset in values_
    std::size_t aux_offset = 0;  // extra cached data in aux_
    Parameter* param = nullptr;
    int index = 0;        // row index, slice offset, class label
    double constant = 0;  // scale factor
    bool requires_grad = false;
  };

  Var push(Node node);
  Var unary(Op op, Var a, Shape shape);
  const Node& node(Var v) const;
  double* mutable_value(int id);
  const double* value_ptr(int id) const;
  double* grad_ptr(int id);

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> aux_;
  std::vector<double> grads_;
  std::vector<char> touched_;
  bool stochastic_ = false;
  std::uint64_t kink_signature_ = 0;

  void record_kink(int side) {
    kink_signature_ = kink_signature_ * 0x100000001B3ULL + 3 + side;
  }
};

// Value-level helpers (no tape).
std::vector<double> softmax(std::span<const double> v);
std::vector<double> sigmoid(std::span<const double> v);
double sigmoid(double x);
double nll_categorical(std::span<const double> logits, int label);
double nll_multilabel(std::span<const double> probs,
                      std::span<const int> targets);

}  // namespace advpriv

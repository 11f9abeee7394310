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

#include "advpriv/nn.hpp"

#include <cmath>
#include <exception>

#include "advpriv/errors.hpp"

namespace advpriv::nn {

void glorot_uniform(Parameter& p, Rng& rng) {
  const Shape s = p.shape();
  if (s.cols == 1) {
    std::fill(p.value.data.begin(), p.value.data.end(), 0.0);
    return;
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
  for (double& v : p.value.data) v = rng.uniform(-limit, limit);
}

LstmWeights::LstmWeights(const std::string& prefix, int input_width,
                         int hidden)
    : w_input(prefix + ".w_input", {4 * hidden, input_width}),
      w_hidden(prefix + ".w_hidden", {4 * hidden, hidden}),
      bias(prefix + ".bias", {4 * hidden, 1}) {}

void LstmWeights::init(Rng& rng) {
  glorot_uniform(w_input, rng);
  glorot_uniform(w_hidden, rng);
  glorot_uniform(bias, rng);
}

ParameterList LstmWeights::parameters() { return {&w_input, &w_hidden, &bias}; }

LstmLeaves LstmLeaves::bind(Tape& tape, LstmWeights& w, Grad mode) {
  return {tape.param(w.w_input, mode), tape.param(w.w_hidden, mode),
          tape.param(w.bias, mode), w.hidden()};
}

LstmState lstm_step(Tape& tape, const LstmLeaves& w, Var x, LstmState prev) {
  const int d = w.hidden;
  Var pre = tape.add(tape.matvec(w.w_input, x), w.bias);
  if (prev.h.valid()) pre = tape.add(pre, tape.matvec(w.w_hidden, prev.h));
  const Var in_gate = tape.sigmoid(tape.slice(pre, 0, d));
  const Var forget = tape.sigmoid(tape.slice(pre, d, d));
  const Var cell = tape.tanh(tape.slice(pre, 2 * d, d));
  const Var out_gate = tape.sigmoid(tape.slice(pre, 3 * d, d));
  Var c = tape.mul(in_gate, cell);
  if (prev.c.valid()) c = tape.add(tape.mul(forget, prev.c), c);
  const Var h = tape.mul(out_gate, tape.tanh(c));
  return {h, c};
}

Encoder::Encoder(int vocab_size, int dim)
    : embedding("encoder.embedding", {vocab_size, kEmbeddingWidth}),
      lstm("encoder.lstm", kEmbeddingWidth, dim) {}

void Encoder::init(Rng& rng) {
  glorot_uniform(embedding, rng);
  lstm.init(rng);
}

Var Encoder::encode(Tape& tape, std::span<const int> ids, Grad mode,
                    Dropout dropout) {
  if (ids.empty()) throw InvalidInputError("encode: empty token sequence");
  const LstmLeaves w = LstmLeaves::bind(tape, lstm, mode);
  LstmState state;
  for (const int id : ids) {
    Var x = tape.row(embedding, id, mode);
    if (dropout.active()) x = tape.dropout(x, dropout.rate, *dropout.rng);
    state = lstm_step(tape, w, x, state);
  }
  return state.h;
}

std::vector<double> Encoder::represent(std::span<const int> ids) const {
  Tape tape;
  // Frozen leaves never write to the parameters.
  const Var r =
      const_cast<Encoder&>(*this).encode(tape, ids, Grad::kFrozen, {});
  const auto v = tape.value(r);
  return {v.begin(), v.end()};
}

ParameterList Encoder::parameters() {
  return concat({{&embedding}, lstm.parameters()});
}

Head::Head(const std::string& prefix, int input_width, int outputs)
    : w1(prefix + ".w1", {kHiddenWidth, input_width}),
      b1(prefix + ".b1", {kHiddenWidth, 1}),
      w2(prefix + ".w2", {outputs, kHiddenWidth}),
      b2(prefix + ".b2", {outputs, 1}) {}

void Head::init(Rng& rng) {
  glorot_uniform(w1, rng);
  glorot_uniform(b1, rng);
  glorot_uniform(w2, rng);
  glorot_uniform(b2, rng);
}

Var Head::forward(Tape& tape, Var input, Grad mode) {
  const Var hidden = tape.relu(
      tape.add(tape.matvec(tape.param(w1, mode), input), tape.param(b1, mode)));
  return tape.add(tape.matvec(tape.param(w2, mode), hidden),
                  tape.param(b2, mode));
}

std::vector<double> Head::logits(std::span<const double> input) const {
  Tape tape;
  const Var x = tape.input(input);
  const Var out = const_cast<Head&>(*this).forward(tape, x, Grad::kFrozen);
  const auto v = tape.value(out);
  return {v.begin(), v.end()};
}

ParameterList Head::parameters() { return {&w1, &b1, &w2, &b2}; }

CharLm::CharLm(int char_vocab_size, int dim, int bos_id)
    : embedding("charlm.embedding", {char_vocab_size, kEmbeddingWidth}),
      lstm("charlm.lstm", kEmbeddingWidth, dim),
      w_out("charlm.w_out", {char_vocab_size, dim}),
      b_out("charlm.b_out", {char_vocab_size, 1}),
      bos_(bos_id) {
  if (bos_id < 0 || bos_id >= char_vocab_size) {
    throw IndexError("charlm: BOS id outside the character vocabulary");
  }
}

void CharLm::init(Rng& rng) {
  glorot_uniform(embedding, rng);
  lstm.init(rng);
  glorot_uniform(w_out, rng);
  glorot_uniform(b_out, rng);
}

Var CharLm::nll(Tape& tape, std::span<const int> chars, Var r, Grad mode) {
  if (chars.empty()) throw InvalidInputError("charlm: empty character sequence");
  if (tape.shape(r) != Shape{dim(), 1}) {
    throw InvalidShapeError("charlm: representation " +
                            to_string(tape.shape(r)) + " for hidden size " +
                            std::to_string(dim()));
  }
  const LstmLeaves w = LstmLeaves::bind(tape, lstm, mode);
  const Var out_w = tape.param(w_out, mode);
  const Var out_b = tape.param(b_out, mode);
  const std::vector<double> zeros(static_cast<std::size_t>(dim()), 0.0);
  LstmState state{r, tape.input(zeros)};

  Var total;
  int previous = bos_;
  for (const int target : chars) {
    const Var x = tape.row(embedding, previous, mode);
    state = lstm_step(tape, w, x, state);
    const Var logits = tape.add(tape.matvec(out_w, state.h), out_b);
    const Var step = tape.nll_categorical(logits, target);
    total = total.valid() ? tape.add(total, step) : step;
    previous = target;
  }
  return total;
}

ParameterList CharLm::parameters() {
  return concat({{&embedding}, lstm.parameters(), {&w_out, &b_out}});
}

ParameterList concat(std::initializer_list<ParameterList> lists) {
  ParameterList out;
  for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
  return out;
}

std::vector<std::vector<double>> encode_batch(
    const Encoder& encoder, const std::vector<std::vector<int>>& sequences) {
  std::vector<std::vector<double>> out(sequences.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(sequences.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = encoder.represent(sequences[i]);
    } catch (...) {
#pragma omp critical(advpriv_encode_batch)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace serial {

std::vector<std::vector<double>> encode_batch(
    const Encoder& encoder, const std::vector<std::vector<int>>& sequences) {
  std::vector<std::vector<double>> out;
  out.reserve(sequences.size());
  for (const auto& seq : sequences) out.push_back(encoder.represent(seq));
  return out;
}

}  // namespace serial

}  // namespace advpriv::nn

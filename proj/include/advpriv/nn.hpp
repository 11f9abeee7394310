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

#include <span>
#include <string>
#include <vector>

#include "advpriv/rng.hpp"
#include "advpriv/tape.hpp"
#include "advpriv/tensor.hpp"

namespace advpriv::nn {

inline constexpr int kEmbeddingWidth = 32;
inline constexpr int kHiddenWidth = 64;

// Dropout applied by a forward pass. Inactive when rate is 0 or rng is null.
struct Dropout {
  double rate = 0.0;
  Rng* rng = nullptr;

  bool active() const { return rate > 0.0 && rng != nullptr; }
};

// Uniform Glorot init for weights, zeros for biases.
void glorot_uniform(Parameter& p, Rng& rng);

// Weights of one LSTM layer. Gates are stacked [input, forget, cell, output]
// along the rows of w_input / w_hidden / bias.
struct LstmWeights {
  Parameter w_input;   // 4d x input width
  Parameter w_hidden;  // 4d x d
  Parameter bias;      // 4d

  LstmWeights() = default;
  LstmWeights(const std::string& prefix, int input_width, int hidden);

  int hidden() const { return w_hidden.shape().cols; }
  void init(Rng& rng);
  ParameterList parameters();
};

struct LstmState {
  Var h;  // invalid means all-zero
  Var c;
};

// Tape leaves for one LSTM, created once per sequence.
struct LstmLeaves {
  Var w_input;
  Var w_hidden;
  Var bias;
  int hidden = 0;

  static LstmLeaves bind(Tape& tape, LstmWeights& w, Grad mode);
};

LstmState lstm_step(Tape& tape, const LstmLeaves& w, Var x, LstmState prev);

// Word embeddings followed by a single-layer LSTM. The representation r(x) is
// the final hidden state.
class Encoder {
 public:
  Encoder() = default;
  Encoder(int vocab_size, int dim);

  void init(Rng& rng);

  // Throws InvalidInputError for an empty sequence, IndexError for an id
  // outside the vocabulary. Dropout hits the LSTM input at every step.
  Var encode(Tape& tape, std::span<const int> ids, Grad mode,
             Dropout dropout = {});

  // Inference-only r(x), dropout off.
  std::vector<double> represent(std::span<const int> ids) const;

  int dim() const { return lstm.hidden(); }
  int vocab_size() const { return embedding.shape().rows; }
  ParameterList parameters();

  Parameter embedding;
  LstmWeights lstm;
};

// One ReLU hidden layer of width 64, then a linear output layer.
class Head {
 public:
  Head() = default;
  Head(const std::string& prefix, int input_width, int outputs);

  void init(Rng& rng);
  Var forward(Tape& tape, Var input, Grad mode);
  std::vector<double> logits(std::span<const double> input) const;

  int input_width() const { return w1.shape().cols; }
  int outputs() const { return w2.shape().rows; }
  ParameterList parameters();

  Parameter w1;
  Parameter b1;
  Parameter w2;
  Parameter b2;
};

// Character-level LSTM language model whose hidden state starts at r(x) and
// whose cell state starts at zero.
class CharLm {
 public:
  CharLm() = default;
  CharLm(int char_vocab_size, int dim, int bos_id);

  void init(Rng& rng);

  // Teacher-forced -sum_i log P(c_i | c_<i, r), with BOS fed before c_1.
  // Throws InvalidInputError for an empty sequence.
  Var nll(Tape& tape, std::span<const int> chars, Var r, Grad mode);

  int dim() const { return lstm.hidden(); }
  int vocab_size() const { return embedding.shape().rows; }
  int bos() const { return bos_; }
  ParameterList parameters();

  Parameter embedding;
  LstmWeights lstm;
  Parameter w_out;
  Parameter b_out;

 private:
  int bos_ = 0;
};

ParameterList concat(std::initializer_list<ParameterList> lists);

// Parallel inference over a batch of sequences; row i is r(sequences[i]).
std::vector<std::vector<double>> encode_batch(
    const Encoder& encoder, const std::vector<std::vector<int>>& sequences);

namespace serial {
std::vector<std::vector<double>> encode_batch(
    const Encoder& encoder, const std::vector<std::vector<int>>& sequences);
}  // namespace serial

}  // namespace advpriv::nn

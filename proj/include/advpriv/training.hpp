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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advpriv/data.hpp"
#include "advpriv/nn.hpp"
#include "advpriv/optim.hpp"
#include "advpriv/tape.hpp"

namespace advpriv {

enum class Regime : std::uint8_t { kStandard, kMultidetask, kAdvgen, kDecluster };

// Sign applied to the declustering pair term. kAsPrinted uses
// alpha * (0.5 - hamming) * ||r - r'||^2; kNegated flips it.
enum class DeclusterSign : std::uint8_t { kAsPrinted, kNegated };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view s);
std::string_view to_string(DeclusterSign sign);
DeclusterSign parse_decluster_sign(std::string_view s);

struct TrainConfig {
  Regime regime = Regime::kStandard;
  int dim = 32;
  int epochs = 8;
  int batch_size = 16;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  double beta = 1.0;
  InputSetting setting = InputSetting::kRaw;
  double dropout = 0.2;
  DeclusterSign decluster_sign = DeclusterSign::kAsPrinted;
  // Generator input is truncated to this many characters (0 = no limit).
  int max_chars = 300;

  // alpha = beta = 1 for the adversarial regimes, alpha = 0.1 for
  // declustering.
  static TrainConfig for_regime(Regime regime);

  // Throws ConfigError for invalid settings or a corpus the regime cannot use.
  void validate(const Corpus& corpus) const;
};

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
};

// Encoder and prediction head of the main classifier, plus everything needed
// to reuse it on a corpus.
struct MainCheckpoint {
  nn::Encoder encoder;
  nn::Head head;
  Vocabulary vocabulary;
  TrainConfig config;
  std::vector<std::string> label_names;
  std::vector<std::string> attribute_names;
  AttributeKind attribute_kind = AttributeKind::kDemographic;
  // Set when the head predicts the private attributes (trained upper bound).
  bool private_target = false;
  double dev_accuracy = 0.0;
  int epoch = 0;  // selected epoch, 1-based
  std::vector<EpochLog> history;
  AdamState optimizer;

  ParameterList parameters();
};

// Index of the best value; the earliest epoch wins ties.
std::size_t select_best_epoch(std::span<const double> dev_accuracies);

// Normalized Hamming distance between two binary vectors.
double hamming_normalized(std::span<const int> a, std::span<const int> b);

// Per-example objectives, exposed for gradient and value checks.
namespace objective {

// alpha * -log P(y | x) + beta * -log P(not z | r), with the adversary
// probabilities already passed through the sigmoid.
Var multidetask_main(Tape& tape, Var logits, int label, Var adversary_probs,
                     std::span<const int> z, double alpha, double beta);

// -log P(z | r) for the duplicate adversary.
Var multidetask_adversary(Tape& tape, Var adversary_probs,
                          std::span<const int> z);

// alpha * -log P(y | x) - beta * generator_nll.
Var advgen_main(Tape& tape, Var logits, int label, Var generator_nll,
                double alpha, double beta);

// sign * alpha * (0.5 - hamming(z, z')) * ||r - r'||^2
Var decluster_pair(Tape& tape, Var r, Var partner_r, std::span<const int> z,
                   std::span<const int> partner_z, double alpha,
                   DeclusterSign sign);

}  // namespace objective

enum class StepKind : std::uint8_t { kAuxiliary, kMain };

// Called after every optimizer step. Tests use it to check which parameters
// each step touched.
using StepObserver = std::function<void(StepKind)>;
using EpochCallback = std::function<void(const EpochLog&)>;

// Phase-1 trainer. Owns the main model and, depending on the regime, the
// duplicate adversary or the character-level generator.
class MainTrainer {
 public:
  // With `private_target` the head predicts z through sigmoid outputs
  // instead of y (standard regime only).
  MainTrainer(const Corpus& corpus, TrainConfig config,
              bool private_target = false);

  // One alternating update on `batch` (corpus example positions): an
  // auxiliary step when the regime has one, then a main step. Returns the
  // mean main-step loss.
  double train_batch(std::span<const std::size_t> batch);

  // Runs every epoch and returns the snapshot with the best dev accuracy.
  MainCheckpoint run(const EpochCallback& on_epoch = {});

  double accuracy(Split split) const;
  // Redraws the declustering partner of every training example.
  void resample_partners();

  void set_observer(StepObserver observer) { observer_ = std::move(observer); }

  nn::Encoder& encoder() { return encoder_; }
  nn::Head& head() { return head_; }
  nn::Head& adversary() { return adversary_; }
  nn::CharLm& generator() { return generator_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  const TrainConfig& config() const { return config_; }
  std::size_t partner_of(std::size_t example) const;

 private:
  MainCheckpoint snapshot(int epoch, double dev_accuracy) const;

  const Corpus& corpus_;
  TrainConfig config_;
  bool private_target_ = false;
  Vocabulary vocabulary_;
  std::vector<std::vector<int>> ids_;    // per corpus example
  std::vector<std::vector<int>> chars_;  // advgen only
  std::vector<std::size_t> train_;
  std::vector<std::size_t> partner_;     // decluster only, by corpus position

  nn::Encoder encoder_;
  nn::Head head_;
  nn::Head adversary_;
  nn::CharLm generator_;
  std::optional<Adam> main_optimizer_;
  std::optional<Adam> aux_optimizer_;

  Rng shuffle_rng_;
  Rng dropout_rng_;
  Rng partner_rng_;
  StepObserver observer_;
};

MainCheckpoint train_main(const Corpus& corpus, const TrainConfig& config,
                          const EpochCallback& on_epoch = {});
MainCheckpoint train_standard(const Corpus& corpus, TrainConfig config);
MainCheckpoint train_multidetask(const Corpus& corpus, TrainConfig config);
MainCheckpoint train_advgen(const Corpus& corpus, TrainConfig config);
MainCheckpoint train_decluster(const Corpus& corpus, TrainConfig config);

// Encoder + sigmoid head trained directly on z with the main-model protocol
// (the trained upper bound). Selection uses mean dev attribute accuracy.
MainCheckpoint train_private_classifier(const Corpus& corpus,
                                        TrainConfig config);

// Predicted class per sequence (argmax of the head logits).
std::vector<int> predict_labels(const MainCheckpoint& checkpoint,
                                const std::vector<std::vector<int>>& ids);

// Token ids of `split` under the checkpoint's vocabulary and input setting.
// Throws SchemaError when the corpus labels or attributes differ from the
// checkpoint's.
std::vector<std::vector<int>> encode_split(const MainCheckpoint& checkpoint,
                                           const Corpus& corpus, Split split);

// Phase-2 dataset: one (r(x), z) row per example of a split.
struct RepresentationSet {
  int dim = 0;
  std::vector<std::string> attribute_names;
  std::vector<std::vector<double>> r;
  std::vector<std::vector<int>> z;

  std::size_t size() const { return r.size(); }
};

RepresentationSet export_representations(const MainCheckpoint& checkpoint,
                                         const Corpus& corpus, Split split);

// Text format: a header (`# advpriv representations v1`, `dim`, `attributes`,
// `count` lines) followed by one row per record with dim floats in
// round-trip precision and then K binary values.
std::string format_representations(const RepresentationSet& set);
RepresentationSet parse_representations(std::string_view text);
void write_representations(const RepresentationSet& set,
                           const std::string& path);
RepresentationSet read_representations(const std::string& path);

// Versioned binary container: magic, version, JSON metadata, then raw
// little-endian float64 arrays in metadata order. Round-trips bit-exactly.
void save_checkpoint(const MainCheckpoint& checkpoint, const std::string& path);
MainCheckpoint load_checkpoint(const std::string& path);
std::string serialize_checkpoint(const MainCheckpoint& checkpoint);
MainCheckpoint deserialize_checkpoint(std::string_view bytes);

}  // namespace advpriv

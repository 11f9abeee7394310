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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advpriv/config.hpp"
#include "advpriv/data.hpp"
#include "advpriv/nn.hpp"
#include "advpriv/training.hpp"

namespace advpriv {

enum class FAveraging : std::uint8_t { kMicro, kMacro };

// 1 - mean(accuracies). `scale` is 1 for fractions and 100 for percentages.
// Throws InvalidInputError for an empty list or an accuracy outside
// [0, scale].
double privacy_demographic(std::span<const double> accuracies,
                           double scale = 1.0);

// F1 with presence as the positive class, over all (example, attribute)
// cells (micro) or averaged over attributes (macro). F = 0 when precision +
// recall = 0. Throws InvalidShapeError when shapes differ.
double f_score(const std::vector<std::vector<int>>& predictions,
               const std::vector<std::vector<int>>& gold,
               FAveraging averaging = FAveraging::kMicro);

// 1 - f_score.
double privacy_ner(const std::vector<std::vector<int>>& predictions,
                   const std::vector<std::vector<int>>& gold,
                   FAveraging averaging = FAveraging::kMicro);

// Accuracy of each attribute column.
std::vector<double> attribute_accuracies(
    const std::vector<std::vector<int>>& predictions,
    const std::vector<std::vector<int>>& gold);

// Privacy of `predictions` under the formula of `kind`.
double privacy_score(const std::vector<std::vector<int>>& predictions,
                     const std::vector<std::vector<int>>& gold,
                     AttributeKind kind,
                     FAveraging averaging = FAveraging::kMicro);

// Index of the lowest privacy; the earliest epoch wins ties.
std::size_t select_worst_privacy(std::span<const double> dev_privacy);

struct AttackConfig {
  int epochs = 16;
  int batch_size = 16;
  std::uint64_t seed = 0;
  AttributeKind kind = AttributeKind::kDemographic;
  FAveraging averaging = FAveraging::kMicro;
};

struct AttackerCheckpoint {
  nn::Head head;  // r -> K logits, read through a sigmoid
  double dev_privacy = 0.0;
  int epoch = 0;  // 1-based
  std::vector<double> history;  // dev privacy per epoch
};

// Thresholds sigmoid outputs at 0.5.
std::vector<std::vector<int>> predict_attributes(const nn::Head& head,
                                                 const RepresentationSet& set);

// Trains a fresh sigmoid head on (r, z) pairs and keeps the epoch with the
// lowest dev privacy. Throws InvalidShapeError when the sets disagree on d
// or K, InvalidInputError when either is empty.
AttackerCheckpoint train_attacker(const RepresentationSet& train,
                                  const RepresentationSet& dev,
                                  const AttackConfig& config);

// Fraction of `split` whose argmax prediction equals y. Throws
// InvalidInputError for an empty split.
double evaluate_accuracy(const MainCheckpoint& checkpoint,
                         const Corpus& corpus, Split split);

// Test accuracy per attribute of an encoder + sigmoid head trained on z with
// the main-model protocol.
std::vector<double> trained_upper_bound(const Corpus& corpus,
                                        const TrainConfig& config);

// Predicts each attribute's most frequent training value everywhere.
std::vector<std::vector<int>> most_frequent_predictions(const Corpus& corpus,
                                                        Split split);

// Permutes r across records, breaking the r <-> z association.
void shuffle_representations(RepresentationSet& set, std::uint64_t seed);

struct PrivacyReport {
  std::string regime;
  int dim = 0;
  std::string setting;
  std::uint64_t seed = 0;
  AttributeKind kind = AttributeKind::kDemographic;
  FAveraging averaging = FAveraging::kMicro;
  bool shuffled = false;
  std::vector<std::string> attribute_names;

  double main_accuracy = 0.0;
  int main_epoch = 0;
  double main_baseline_accuracy = 0.0;

  std::vector<double> attacker_accuracy;
  double attacker_f = 0.0;
  double privacy = 0.0;
  int attacker_epoch = 0;
  double attacker_dev_privacy = 0.0;

  std::vector<double> baseline_accuracy;
  double baseline_f = 0.0;
  double baseline_privacy = 0.0;

  std::vector<double> upper_bound_accuracy;  // empty when not computed

  KeyValueConfig to_config() const;
  static PrivacyReport from_config(const KeyValueConfig& config);
  // Human-readable aligned table (percentages).
  std::string table() const;
};

struct AttackOptions {
  AttackConfig attack;
  bool shuffle_representations = false;
  bool upper_bound = false;
};

// Phases 2 and 3: exports representations, trains the attacker on the train
// split (selected on dev), and reports on the test split.
PrivacyReport run_attack(const MainCheckpoint& checkpoint, const Corpus& corpus,
                         const AttackOptions& options);

void save_report(const PrivacyReport& report, const std::string& path);
PrivacyReport load_report(const std::string& path);

// One grid cell's headline numbers.
struct GridRow {
  std::string regime;
  int dim = 0;
  std::uint64_t seed = 0;
  double main_accuracy = 0.0;
  double privacy = 0.0;
};

// Table of Main and Priv. per (regime, d), averaged over seeds, with signed
// differences against the standard regime at the same d, preceded by a
// most-frequent baseline row.
std::string summary_table(const std::vector<GridRow>& rows,
                          double baseline_main, double baseline_privacy);

}  // namespace advpriv

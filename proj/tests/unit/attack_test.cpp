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

#include "advpriv/attack.hpp"

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "advpriv/errors.hpp"

namespace advpriv {
namespace {

using Matrix = std::vector<std::vector<int>>;

Corpus small_corpus(int examples, std::uint64_t seed = 4) {
  SynthConfig s;
  s.examples = examples;
  s.private_signal = 1.0;
  s.vocab_size = 40;
  s.min_length = 4;
  s.max_length = 8;
  s.seed = seed;
  return synth_generate(s);
}

TrainConfig quick(int epochs = 2) {
  TrainConfig c;
  c.dim = 8;
  c.epochs = epochs;
  c.seed = 2;
  return c;
}

TEST(PrivacyDemographic, TableBaselines) {
  struct Row {
    double gender, age, privacy;
  };
  for (const Row& r : {Row{61.6, 58.4, 40.0}, Row{75.2, 50.9, 36.95},
                       Row{61.0, 50.1, 44.45}, Row{58.8, 56.7, 42.25},
                       Row{63.5, 63.7, 36.4}}) {
    const std::vector<double> acc{r.gender, r.age};
    EXPECT_NEAR(privacy_demographic(acc, 100.0), r.privacy, 1e-9);
  }
  EXPECT_EQ(privacy_demographic(std::vector<double>{1.0, 1.0}), 0.0);
  EXPECT_THROW(privacy_demographic(std::vector<double>{}), InvalidInputError);
  EXPECT_THROW(privacy_demographic(std::vector<double>{1.2}),
               InvalidInputError);
}

TEST(PrivacyNer, Examples) {
  const Matrix gold{{1, 0}, {1, 1}, {0, 0}};
  EXPECT_EQ(privacy_ner(gold, gold), 0.0);
  // TP = 2, FP = 1, FN = 1.
  const Matrix pred{{1, 1}, {1, 0}, {0, 0}};
  EXPECT_NEAR(f_score(pred, gold), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(privacy_ner(pred, gold), 1.0 / 3.0, 1e-15);
  const Matrix none{{0, 0}, {0, 0}, {0, 0}};
  EXPECT_EQ(privacy_ner(none, gold), 1.0);
  // Per attribute: F(a0) = 1, F(a1) = 0 (TP 0).
  EXPECT_NEAR(f_score(Matrix{{1, 1}, {1, 0}, {0, 0}}, gold,
                      FAveraging::kMacro),
              0.5 * (1.0 + 0.0), 1e-15);
  EXPECT_THROW(privacy_ner(Matrix{{1, 0}}, gold), InvalidShapeError);
  EXPECT_THROW(privacy_ner(Matrix{{1}, {1}, {0}}, gold), InvalidShapeError);
}

TEST(PrivacyScore, MonotoneInAttackerQuality) {
  const Matrix gold{{1, 0}, {1, 1}, {0, 0}, {0, 1}};
  const Matrix worse{{0, 0}, {1, 0}, {1, 0}, {0, 0}};
  const Matrix better{{1, 0}, {1, 0}, {0, 0}, {0, 1}};
  for (auto kind : {AttributeKind::kDemographic, AttributeKind::kEntity}) {
    EXPECT_GT(privacy_score(worse, gold, kind), privacy_score(better, gold, kind));
    EXPECT_GT(privacy_score(better, gold, kind), privacy_score(gold, gold, kind));
  }
  const auto acc = attribute_accuracies(better, gold);
  EXPECT_EQ(acc, (std::vector<double>{1.0, 0.75}));
}

TEST(Selection, WorstDevPrivacyEarliestTie) {
  EXPECT_EQ(select_worst_privacy(std::vector<double>{0.45, 0.40, 0.42}), 1u);
  EXPECT_EQ(select_worst_privacy(std::vector<double>{0.3, 0.4, 0.3}), 0u);
  EXPECT_THROW(select_worst_privacy(std::vector<double>{}), InvalidInputError);
}

RepresentationSet planted(std::size_t n, int dim, std::uint64_t seed,
                          bool signal) {
  Rng rng(seed);
  RepresentationSet s;
  s.dim = dim;
  s.attribute_names = {"a", "b"};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> z{rng.bernoulli(0.5), rng.bernoulli(0.5)};
    std::vector<double> r(dim);
    for (double& v : r) v = rng.uniform(-1, 1);
    if (signal) {
      r[0] = z[0] ? 1.0 : -1.0;
      r[1] = z[1] ? 1.0 : -1.0;
    }
    s.r.push_back(r);
    s.z.push_back(z);
  }
  return s;
}

TEST(Attacker, LearnsPlantedSignalAndSelectsWorstPrivacy) {
  const auto train = planted(400, 6, 1, true);
  const auto dev = planted(100, 6, 2, true);
  AttackConfig config;
  config.epochs = 6;
  const auto ck = train_attacker(train, dev, config);
  ASSERT_EQ(ck.history.size(), 6u);
  EXPECT_EQ(ck.epoch, static_cast<int>(select_worst_privacy(ck.history)) + 1);
  EXPECT_EQ(ck.dev_privacy, ck.history[ck.epoch - 1]);
  const auto acc =
      attribute_accuracies(predict_attributes(ck.head, dev), dev.z);
  EXPECT_GT(acc[0], 0.95);
  EXPECT_GT(acc[1], 0.95);
  EXPECT_EQ(ck.head.input_width(), 6);

  const auto again = train_attacker(train, dev, config);
  EXPECT_EQ(again.head.w1.value.data, ck.head.w1.value.data);
}

TEST(Attacker, RejectsMismatchedSets) {
  const auto train = planted(20, 6, 1, true);
  EXPECT_THROW(train_attacker(train, planted(20, 5, 2, true), {}),
               InvalidShapeError);
  RepresentationSet one_attr = planted(20, 6, 2, true);
  one_attr.attribute_names.pop_back();
  EXPECT_THROW(train_attacker(train, one_attr, {}), InvalidShapeError);
  EXPECT_THROW(train_attacker(train, RepresentationSet{6, {"a", "b"}, {}, {}},
                              {}),
               InvalidInputError);
}

TEST(Shuffle, PermutesRepresentationsOnly) {
  auto s = planted(50, 4, 3, true);
  const auto original = s;
  shuffle_representations(s, 9);
  EXPECT_EQ(s.z, original.z);
  EXPECT_NE(s.r, original.r);
  auto sorted = s.r;
  auto expected = original.r;
  std::sort(sorted.begin(), sorted.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(sorted, expected);
}

// A head whose output ignores the input: w2 = 0, bias favours class 0.
MainCheckpoint constant_model(const Corpus& c) {
  MainCheckpoint ck = train_standard(c, quick(1));
  std::fill(ck.head.w2.value.data.begin(), ck.head.w2.value.data.end(), 0.0);
  ck.head.b2.value.data = {1.0, 0.0};
  return ck;
}

TEST(EvaluateAccuracy, ConstantPredictionModel) {
  Corpus c = small_corpus(60);
  const MainCheckpoint ck = constant_model(c);
  int seen = 0;
  for (auto& ex : c.examples) {
    if (ex.split != Split::kTest) continue;
    ex.split = Split::kDev;
    if (seen < 3) {
      ex.split = Split::kTest;
      ex.label = seen < 2 ? 0 : 1;  // gold [A, A, B]
      ++seen;
    }
  }
  ASSERT_EQ(c.count(Split::kTest), 3u);
  EXPECT_NEAR(evaluate_accuracy(ck, c, Split::kTest), 2.0 / 3.0, 1e-15);
}

TEST(EvaluateAccuracy, MatchesManualCount) {
  const Corpus c = small_corpus(100);
  const auto ck = train_standard(c, quick(2));
  const auto test = c.indices(Split::kTest);
  ASSERT_EQ(test.size(), 10u);
  int correct = 0;
  for (auto p : test) {
    const auto ids = encode_example(c.examples[p], ck.vocabulary,
                                    InputSetting::kRaw);
    const auto logits = ck.head.logits(ck.encoder.represent(ids));
    const int predicted = logits[1] > logits[0] ? 1 : 0;
    correct += predicted == c.examples[p].label;
  }
  EXPECT_DOUBLE_EQ(evaluate_accuracy(ck, c, Split::kTest), correct / 10.0);

  Corpus no_test = c;
  for (auto& ex : no_test.examples) {
    if (ex.split == Split::kTest) ex.split = Split::kDev;
  }
  EXPECT_THROW(evaluate_accuracy(ck, no_test, Split::kTest),
               InvalidInputError);
}

TEST(MostFrequent, PredictsTrainingMajority) {
  const Corpus c = small_corpus(100);
  const auto pred = most_frequent_predictions(c, Split::kTest);
  ASSERT_EQ(pred.size(), c.count(Split::kTest));
  for (int j = 0; j < 2; ++j) {
    EXPECT_EQ(pred[0][j], most_frequent_baseline(c, j, Split::kTest).prediction);
  }
}

TEST(RunAttack, ReportIsConsistentAndDeterministic) {
  const Corpus c = small_corpus(200);
  const auto ck = train_standard(c, quick(2));
  const auto bytes = serialize_checkpoint(ck);
  AttackOptions options;
  options.attack.epochs = 3;
  options.attack.seed = 5;
  const auto report = run_attack(ck, c, options);
  EXPECT_EQ(serialize_checkpoint(ck), bytes);

  EXPECT_GE(report.privacy, 0.0);
  EXPECT_LE(report.privacy, 1.0);
  EXPECT_NEAR(report.privacy,
              1.0 - 0.5 * (report.attacker_accuracy[0] +
                           report.attacker_accuracy[1]),
              1e-15);
  EXPECT_NEAR(report.baseline_privacy,
              privacy_demographic(report.baseline_accuracy), 1e-15);
  EXPECT_EQ(report.main_accuracy, evaluate_accuracy(ck, c, Split::kTest));
  EXPECT_EQ(report.dim, 8);
  EXPECT_EQ(report.regime, "standard");
  EXPECT_TRUE(report.upper_bound_accuracy.empty());

  const auto text = report.to_config().to_string();
  EXPECT_EQ(run_attack(ck, c, options).to_config().to_string(), text);
  const auto back = PrivacyReport::from_config(KeyValueConfig::parse(text));
  EXPECT_EQ(back.to_config().to_string(), text);
  EXPECT_EQ(back.table(), report.table());
  EXPECT_NE(report.table().find("most frequent"), std::string::npos);

  options.shuffle_representations = true;
  const auto shuffled = run_attack(ck, c, options);
  EXPECT_TRUE(shuffled.shuffled);
  EXPECT_NE(shuffled.to_config().to_string(), text);
}

TEST(RunAttack, UpperBoundOnFullyMarkedCorpus) {
  const Corpus c = small_corpus(300);
  TrainConfig config = quick(3);
  const auto acc = trained_upper_bound(c, config);
  ASSERT_EQ(acc.size(), 2u);
  for (double a : acc) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(RunAttack, RejectsCorpusWithoutAttributes) {
  const Corpus c = small_corpus(60);
  const auto ck = train_standard(c, quick(1));
  Corpus stripped = c;
  stripped.attribute_names.clear();
  for (auto& ex : stripped.examples) ex.z.clear();
  EXPECT_THROW(run_attack(ck, stripped, {}), ConfigError);
}

std::string squeeze(const std::string& line) {
  std::stringstream in(line);
  std::string out;
  for (std::string w; in >> w;) out += (out.empty() ? "" : " ") + w;
  return out;
}

TEST(SummaryTable, RowsAndDeltas) {
  const std::vector<GridRow> rows{
      {"standard", 16, 0, 0.80, 0.30},
      {"standard", 64, 0, 0.85, 0.25},
      {"multidetask", 16, 0, 0.78, 0.36},
      {"multidetask", 64, 0, 0.84, 0.31},
  };
  const std::string table = summary_table(rows, 0.5, 0.45);
  std::vector<std::string> lines;
  std::stringstream in(table);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);  // header, baseline, four cells
  EXPECT_EQ(lines[1].rfind("most frequent", 0), 0u);
  EXPECT_EQ(squeeze(lines[2]), "standard 16 1 80.0 +0.0 30.0 +0.0");
  EXPECT_EQ(squeeze(lines[3]), "standard 64 1 85.0 +0.0 25.0 +0.0");
  EXPECT_EQ(squeeze(lines[4]), "multidetask 16 1 78.0 -2.0 36.0 +6.0");
  EXPECT_EQ(squeeze(lines[5]), "multidetask 64 1 84.0 -1.0 31.0 +6.0");
}

TEST(SummaryTable, AveragesSeedsAndMarksMissingReference) {
  const std::vector<GridRow> rows{
      {"decluster", 32, 0, 0.80, 0.30},
      {"decluster", 32, 1, 0.90, 0.40},
  };
  const std::string table = summary_table(rows, 0.5, 0.45);
  std::stringstream in(table);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(squeeze(line), "decluster 32 2 85.0 n/a 35.0 n/a");
}

}  // namespace
}  // namespace advpriv

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
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "advpriv/errors.hpp"
#include "advpriv/optim.hpp"
#include "container.hpp"

namespace advpriv {

namespace {

void check_same_shape(const std::vector<std::vector<int>>& predictions,
                      const std::vector<std::vector<int>>& gold) {
  if (predictions.size() != gold.size()) {
    throw InvalidShapeError("predictions for " +
                            std::to_string(predictions.size()) +
                            " examples, gold for " +
                            std::to_string(gold.size()));
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i].size() != gold[i].size()) {
      throw InvalidShapeError("example " + std::to_string(i) + " has " +
                              std::to_string(predictions[i].size()) +
                              " predicted and " +
                              std::to_string(gold[i].size()) +
                              " gold attributes");
    }
  }
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  // 2PR / (P + R) = 2TP / (2TP + FP + FN); zero when TP is zero.
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) /
         static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

double privacy_demographic(std::span<const double> accuracies, double scale) {
  if (accuracies.empty()) {
    throw InvalidInputError("privacy needs at least one attribute accuracy");
  }
  for (double a : accuracies) {
    if (!(a >= 0.0 && a <= scale)) {
      throw InvalidInputError("accuracy " + std::to_string(a) +
                              " outside [0, " + std::to_string(scale) + "]");
    }
  }
  const double mean = std::accumulate(accuracies.begin(), accuracies.end(),
                                      0.0) /
                      static_cast<double>(accuracies.size());
  return scale - mean;
}

double f_score(const std::vector<std::vector<int>>& predictions,
               const std::vector<std::vector<int>>& gold,
               FAveraging averaging) {
  check_same_shape(predictions, gold);
  const std::size_t k = gold.empty() ? 0 : gold[0].size();
  std::vector<std::size_t> tp(k), fp(k), fn(k);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != k) {
      throw InvalidShapeError("examples disagree on the number of attributes");
    }
    for (std::size_t j = 0; j < k; ++j) {
      const bool p = predictions[i][j] != 0;
      const bool g = gold[i][j] != 0;
      tp[j] += p && g;
      fp[j] += p && !g;
      fn[j] += !p && g;
    }
  }
  if (k == 0) throw InvalidInputError("F-score of an empty prediction set");
  if (averaging == FAveraging::kMicro) {
    return f1(std::accumulate(tp.begin(), tp.end(), std::size_t{0}),
              std::accumulate(fp.begin(), fp.end(), std::size_t{0}),
              std::accumulate(fn.begin(), fn.end(), std::size_t{0}));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum += f1(tp[j], fp[j], fn[j]);
  return sum / static_cast<double>(k);
}

double privacy_ner(const std::vector<std::vector<int>>& predictions,
                   const std::vector<std::vector<int>>& gold,
                   FAveraging averaging) {
  return 1.0 - f_score(predictions, gold, averaging);
}

std::vector<double> attribute_accuracies(
    const std::vector<std::vector<int>>& predictions,
    const std::vector<std::vector<int>>& gold) {
  check_same_shape(predictions, gold);
  if (gold.empty()) throw InvalidInputError("accuracy of an empty set");
  const std::size_t k = gold[0].size();
  std::vector<double> acc(k, 0.0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != k) {
      throw InvalidShapeError("examples disagree on the number of attributes");
    }
    for (std::size_t j = 0; j < k; ++j) acc[j] += predictions[i][j] == gold[i][j];
  }
  for (double& a : acc) a /= static_cast<double>(gold.size());
  return acc;
}

double privacy_score(const std::vector<std::vector<int>>& predictions,
                     const std::vector<std::vector<int>>& gold,
                     AttributeKind kind, FAveraging averaging) {
  if (kind == AttributeKind::kEntity) {
    return privacy_ner(predictions, gold, averaging);
  }
  return privacy_demographic(attribute_accuracies(predictions, gold));
}

std::size_t select_worst_privacy(std::span<const double> dev_privacy) {
  if (dev_privacy.empty()) throw InvalidInputError("no epochs to select");
  std::size_t best = 0;
  for (std::size_t i = 1; i < dev_privacy.size(); ++i) {
    if (dev_privacy[i] < dev_privacy[best]) best = i;
  }
  return best;
}

std::vector<std::vector<int>> predict_attributes(const nn::Head& head,
                                                 const RepresentationSet& set) {
  std::vector<std::vector<int>> out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto logits = head.logits(set.r[i]);
    out[i].resize(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
      out[i][j] = logits[j] >= 0.0 ? 1 : 0;  // sigmoid >= 0.5
    }
  }
  return out;
}

AttackerCheckpoint train_attacker(const RepresentationSet& train,
                                  const RepresentationSet& dev,
                                  const AttackConfig& config) {
  if (train.size() == 0 || dev.size() == 0) {
    throw InvalidInputError("attacker needs non-empty train and dev sets");
  }
  if (train.dim != dev.dim) {
    throw InvalidShapeError("representation width differs between splits: " +
                            std::to_string(train.dim) + " vs " +
                            std::to_string(dev.dim));
  }
  const int k = static_cast<int>(train.attribute_names.size());
  if (k == 0 || dev.attribute_names.size() != train.attribute_names.size()) {
    throw InvalidShapeError("attribute count differs between splits");
  }
  if (config.epochs <= 0 || config.batch_size <= 0) {
    throw ConfigError("attacker epochs and batch size must be positive");
  }

  Rng init(Rng::splitmix(config.seed ^ 0x41545441434bULL));
  Rng shuffle_rng(Rng::splitmix(config.seed ^ 0x5348554646ULL));
  AttackerCheckpoint best;
  nn::Head head("attacker", train.dim, k);
  head.init(init);
  Adam optimizer(head.parameters());

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  std::vector<double> history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      const double seed = 1.0 / static_cast<double>(end - start);
      for (std::size_t n = start; n < end; ++n) {
        const std::size_t i = order[n];
        Tape t;
        const Var x = t.input(train.r[i]);
        const Var probs = t.sigmoid(head.forward(t, x, Grad::kAccumulate));
        t.backward(t.nll_multilabel(probs, train.z[i]), seed);
      }
      optimizer.step();
    }
    history.push_back(privacy_score(predict_attributes(head, dev), dev.z,
                                    config.kind, config.averaging));
    if (select_worst_privacy(history) == history.size() - 1) {
      best.head = head;
      best.epoch = epoch;
      best.dev_privacy = history.back();
    }
  }
  best.history = std::move(history);
  return best;
}

double evaluate_accuracy(const MainCheckpoint& checkpoint,
                         const Corpus& corpus, Split split) {
  const auto ids = encode_split(checkpoint, corpus, split);
  if (ids.empty()) throw InvalidInputError("accuracy of an empty split");
  const auto predicted = predict_labels(checkpoint, ids);
  const auto positions = corpus.indices(split);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    correct += predicted[i] == corpus.examples[positions[i]].label;
  }
  return static_cast<double>(correct) / static_cast<double>(positions.size());
}

std::vector<double> trained_upper_bound(const Corpus& corpus,
                                        const TrainConfig& config) {
  const MainCheckpoint ck = train_private_classifier(corpus, config);
  const auto ids = encode_split(ck, corpus, Split::kTest);
  if (ids.empty()) throw InvalidInputError("empty test split");
  RepresentationSet test;
  test.dim = ck.encoder.dim();
  test.attribute_names = corpus.attribute_names;
  test.r = nn::encode_batch(ck.encoder, ids);
  for (auto p : corpus.indices(Split::kTest)) {
    test.z.push_back(corpus.examples[p].z);
  }
  return attribute_accuracies(predict_attributes(ck.head, test), test.z);
}

std::vector<std::vector<int>> most_frequent_predictions(const Corpus& corpus,
                                                        Split split) {
  std::vector<int> majority(corpus.attribute_names.size());
  for (std::size_t j = 0; j < majority.size(); ++j) {
    majority[j] =
        most_frequent_baseline(corpus, static_cast<int>(j), split).prediction;
  }
  return std::vector<std::vector<int>>(corpus.count(split), majority);
}

void shuffle_representations(RepresentationSet& set, std::uint64_t seed) {
  Rng rng(Rng::splitmix(seed ^ 0x52455052ULL));
  shuffle(set.r, rng);
}

PrivacyReport run_attack(const MainCheckpoint& checkpoint, const Corpus& corpus,
                         const AttackOptions& options) {
  if (corpus.num_attributes() == 0) {
    throw ConfigError("corpus declares no private attributes");
  }
  if (checkpoint.private_target) {
    throw ConfigError("checkpoint does not hold a main classifier");
  }
  AttackConfig attack = options.attack;
  attack.kind = corpus.attribute_kind;

  auto train = export_representations(checkpoint, corpus, Split::kTrain);
  auto dev = export_representations(checkpoint, corpus, Split::kDev);
  auto test = export_representations(checkpoint, corpus, Split::kTest);
  if (options.shuffle_representations) {
    shuffle_representations(train, attack.seed);
    shuffle_representations(dev, attack.seed + 1);
    shuffle_representations(test, attack.seed + 2);
  }
  const AttackerCheckpoint attacker = train_attacker(train, dev, attack);
  const auto predicted = predict_attributes(attacker.head, test);

  PrivacyReport report;
  report.regime = std::string(to_string(checkpoint.config.regime));
  report.dim = checkpoint.config.dim;
  report.setting = std::string(to_string(checkpoint.config.setting));
  report.seed = attack.seed;
  report.kind = attack.kind;
  report.averaging = attack.averaging;
  report.shuffled = options.shuffle_representations;
  report.attribute_names = corpus.attribute_names;

  report.main_accuracy = evaluate_accuracy(checkpoint, corpus, Split::kTest);
  report.main_epoch = checkpoint.epoch;
  report.main_baseline_accuracy =
      most_frequent_baseline(corpus, -1, Split::kTest).accuracy;

  report.attacker_accuracy = attribute_accuracies(predicted, test.z);
  report.attacker_f = f_score(predicted, test.z, attack.averaging);
  report.privacy =
      privacy_score(predicted, test.z, attack.kind, attack.averaging);
  report.attacker_epoch = attacker.epoch;
  report.attacker_dev_privacy = attacker.dev_privacy;

  const auto baseline = most_frequent_predictions(corpus, Split::kTest);
  report.baseline_accuracy = attribute_accuracies(baseline, test.z);
  report.baseline_f = f_score(baseline, test.z, attack.averaging);
  report.baseline_privacy =
      privacy_score(baseline, test.z, attack.kind, attack.averaging);

  if (options.upper_bound) {
    report.upper_bound_accuracy = trained_upper_bound(corpus, checkpoint.config);
  }
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

std::string signed_pct(double v) {
  char buf[32];
  // Values that round to zero print as +0.0.
  const double p = 100.0 * v;
  std::snprintf(buf, sizeof(buf), "%+.1f", std::abs(p) < 0.05 ? 0.0 : p);
  return buf;
}

void put_list(KeyValueConfig& c, const std::string& prefix,
              const std::vector<double>& values) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    c.set(prefix + "." + std::to_string(j), fmt(values[j]));
  }
}

std::vector<double> get_list(const KeyValueConfig& c, const std::string& prefix,
                             std::size_t k, bool optional) {
  std::vector<double> out;
  if (optional && !c.has(prefix + ".0")) return out;
  for (std::size_t j = 0; j < k; ++j) {
    const std::string key = prefix + "." + std::to_string(j);
    if (!c.has(key)) throw ParseError("report is missing " + key);
    out.push_back(c.get_double(key, 0.0));
  }
  return out;
}

// Pads every column to its widest cell; the first column is left-aligned.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      if (c == 0) {
        line += row[c] + pad;
      } else {
        line += "  " + pad + row[c];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace

KeyValueConfig PrivacyReport::to_config() const {
  KeyValueConfig c;
  c.set("regime", regime);
  c.set("d", std::to_string(dim));
  c.set("setting", setting);
  c.set("seed", std::to_string(seed));
  c.set("attribute_kind", std::string(to_string(kind)));
  c.set("f_averaging", averaging == FAveraging::kMicro ? "micro" : "macro");
  c.set("shuffled", shuffled ? "true" : "false");
  c.set("attributes", nlohmann::json(attribute_names).dump());
  c.set("main.accuracy", fmt(main_accuracy));
  c.set("main.epoch", std::to_string(main_epoch));
  c.set("main.baseline_accuracy", fmt(main_baseline_accuracy));
  put_list(c, "attacker.accuracy", attacker_accuracy);
  c.set("attacker.f", fmt(attacker_f));
  c.set("attacker.epoch", std::to_string(attacker_epoch));
  c.set("attacker.dev_privacy", fmt(attacker_dev_privacy));
  c.set("privacy", fmt(privacy));
  put_list(c, "baseline.accuracy", baseline_accuracy);
  c.set("baseline.f", fmt(baseline_f));
  c.set("baseline.privacy", fmt(baseline_privacy));
  put_list(c, "upper_bound.accuracy", upper_bound_accuracy);
  return c;
}

PrivacyReport PrivacyReport::from_config(const KeyValueConfig& c) {
  PrivacyReport r;
  for (const char* key : {"regime", "d", "attributes", "privacy",
                          "main.accuracy", "baseline.privacy"}) {
    if (!c.has(key)) throw ParseError(std::string("report is missing ") + key);
  }
  r.regime = c.get_string("regime", "");
  r.dim = static_cast<int>(c.get_int("d", 0));
  r.setting = c.get_string("setting", "raw");
  r.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  r.kind = parse_attribute_kind(c.get_string("attribute_kind", "demographic"));
  r.averaging = c.get_string("f_averaging", "micro") == "macro"
                    ? FAveraging::kMacro
                    : FAveraging::kMicro;
  r.shuffled = c.get_string("shuffled", "false") == "true";
  try {
    r.attribute_names = nlohmann::json::parse(c.get_string("attributes", "[]"))
                            .get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report attributes: ") + e.what());
  }
  const std::size_t k = r.attribute_names.size();
  r.main_accuracy = c.get_double("main.accuracy", 0.0);
  r.main_epoch = static_cast<int>(c.get_int("main.epoch", 0));
  r.main_baseline_accuracy = c.get_double("main.baseline_accuracy", 0.0);
  r.attacker_accuracy = get_list(c, "attacker.accuracy", k, false);
  r.attacker_f = c.get_double("attacker.f", 0.0);
  r.attacker_epoch = static_cast<int>(c.get_int("attacker.epoch", 0));
  r.attacker_dev_privacy = c.get_double("attacker.dev_privacy", 0.0);
  r.privacy = c.get_double("privacy", 0.0);
  r.baseline_accuracy = get_list(c, "baseline.accuracy", k, false);
  r.baseline_f = c.get_double("baseline.f", 0.0);
  r.baseline_privacy = c.get_double("baseline.privacy", 0.0);
  r.upper_bound_accuracy = get_list(c, "upper_bound.accuracy", k, true);
  return r;
}

std::string PrivacyReport::table() const {
  std::string out = "regime=" + regime + " d=" + std::to_string(dim) +
                    " setting=" + setting + " seed=" + std::to_string(seed) +
                    (shuffled ? " (shuffled representations)" : "") + "\n";
  const bool entity = kind == AttributeKind::kEntity;
  std::vector<std::string> header{"", "Main", "Priv."};
  if (entity) header.push_back("F");
  for (const auto& name : attribute_names) header.push_back(name);
  std::vector<std::vector<std::string>> rows{header};

  auto row = [&](std::string label, std::string main, double priv, double f,
                 const std::vector<double>& acc) {
    std::vector<std::string> cells{std::move(label), std::move(main),
                                   pct(priv)};
    if (entity) cells.push_back(pct(f));
    for (double a : acc) cells.push_back(pct(a));
    rows.push_back(std::move(cells));
  };
  row("most frequent", pct(main_baseline_accuracy), baseline_privacy,
      baseline_f, baseline_accuracy);
  row(regime, pct(main_accuracy), privacy, attacker_f, attacker_accuracy);
  if (!upper_bound_accuracy.empty()) {
    std::vector<std::string> cells{"upper bound (trained)", "-", "-"};
    if (entity) cells.push_back("-");
    for (double a : upper_bound_accuracy) cells.push_back(pct(a));
    rows.push_back(std::move(cells));
  }
  return out + align(rows);
}

void save_report(const PrivacyReport& report, const std::string& path) {
  detail::write_file_atomic(path, report.to_config().to_string());
}

PrivacyReport load_report(const std::string& path) {
  try {
    return PrivacyReport::from_config(KeyValueConfig::load(path));
  } catch (const ConfigError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string summary_table(const std::vector<GridRow>& rows,
                          double baseline_main, double baseline_privacy) {
  struct Cell {
    std::string regime;
    int dim = 0;
    int seeds = 0;
    double main = 0.0;
    double privacy = 0.0;
  };
  // Regimes in first-appearance order, dimensions ascending.
  std::vector<std::string> regimes;
  std::map<std::pair<std::string, int>, Cell> cells;
  for (const auto& r : rows) {
    if (std::find(regimes.begin(), regimes.end(), r.regime) == regimes.end()) {
      regimes.push_back(r.regime);
    }
    Cell& c = cells[{r.regime, r.dim}];
    c.regime = r.regime;
    c.dim = r.dim;
    ++c.seeds;
    c.main += r.main_accuracy;
    c.privacy += r.privacy;
  }
  for (auto& [key, c] : cells) {
    c.main /= c.seeds;
    c.privacy /= c.seeds;
  }

  std::vector<std::vector<std::string>> out{
      {"regime", "d", "seeds", "Main", "dMain", "Priv.", "dPriv."},
      {"most frequent", "-", "-", pct(baseline_main), "", pct(baseline_privacy),
       ""}};
  for (const auto& regime : regimes) {
    for (const auto& [key, c] : cells) {
      if (key.first != regime) continue;
      const auto ref = cells.find({"standard", c.dim});
      const bool has_ref = ref != cells.end();
      out.push_back({c.regime, std::to_string(c.dim), std::to_string(c.seeds),
                     pct(c.main),
                     has_ref ? signed_pct(c.main - ref->second.main) : "n/a",
                     pct(c.privacy),
                     has_ref ? signed_pct(c.privacy - ref->second.privacy)
                             : "n/a"});
    }
  }
  return align(out);
}

}  // namespace advpriv

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

#include "advpriv/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "advpriv/errors.hpp"
#include "container.hpp"

namespace advpriv {

using nlohmann::json;

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kStandard: return "standard";
    case Regime::kMultidetask: return "multidetask";
    case Regime::kAdvgen: return "advgen";
    case Regime::kDecluster: return "decluster";
  }
  return "?";
}

Regime parse_regime(std::string_view s) {
  for (Regime r : {Regime::kStandard, Regime::kMultidetask, Regime::kAdvgen,
                   Regime::kDecluster}) {
    if (s == to_string(r)) return r;
  }
  throw ConfigError("unknown regime '" + std::string(s) +
                    "' (standard, multidetask, advgen, decluster)");
}

std::string_view to_string(DeclusterSign sign) {
  return sign == DeclusterSign::kAsPrinted ? "as-printed" : "negated";
}

DeclusterSign parse_decluster_sign(std::string_view s) {
  if (s == "as-printed") return DeclusterSign::kAsPrinted;
  if (s == "negated") return DeclusterSign::kNegated;
  throw ConfigError("unknown decluster sign '" + std::string(s) +
                    "' (as-printed, negated)");
}

TrainConfig TrainConfig::for_regime(Regime regime) {
  TrainConfig c;
  c.regime = regime;
  if (regime == Regime::kDecluster) c.alpha = 0.1;
  return c;
}

void TrainConfig::validate(const Corpus& corpus) const {
  if (dim <= 0) throw ConfigError("d must be positive");
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must be in [0, 1)");
  }
  if (max_chars < 0) throw ConfigError("max_chars must be non-negative");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const bool adversarial =
      regime == Regime::kMultidetask || regime == Regime::kAdvgen;
  if (adversarial && !(beta > 0.0)) {
    throw ConfigError("beta must be positive for adversarial regimes");
  }
  const std::size_t train = corpus.count(Split::kTrain);
  if (train == 0) throw ConfigError("empty training split");
  if (corpus.count(Split::kDev) == 0) throw ConfigError("empty dev split");
  if ((regime == Regime::kMultidetask || regime == Regime::kDecluster) &&
      corpus.num_attributes() == 0) {
    throw ConfigError(std::string(to_string(regime)) +
                      " needs private attributes (K = 0)");
  }
  if (regime == Regime::kDecluster && train < 2) {
    throw ConfigError("decluster needs at least two training examples");
  }
  if (setting == InputSetting::kDemo &&
      (corpus.num_attributes() == 0 ||
       corpus.attribute_kind != AttributeKind::kDemographic)) {
    throw ConfigError("+demo input needs demographic private attributes");
  }
}

ParameterList MainCheckpoint::parameters() {
  return nn::concat({encoder.parameters(), head.parameters()});
}

std::size_t select_best_epoch(std::span<const double> dev_accuracies) {
  if (dev_accuracies.empty()) throw InvalidInputError("no epochs to select");
  std::size_t best = 0;
  for (std::size_t i = 1; i < dev_accuracies.size(); ++i) {
    if (dev_accuracies[i] > dev_accuracies[best]) best = i;
  }
  return best;
}

double hamming_normalized(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw InvalidShapeError("hamming distance of vectors of length " +
                            std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  }
  if (a.empty()) throw InvalidInputError("hamming distance of empty vectors");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

namespace objective {

Var multidetask_main(Tape& tape, Var logits, int label, Var adversary_probs,
                     std::span<const int> z, double alpha, double beta) {
  std::vector<int> flipped(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) flipped[j] = z[j] == 0 ? 1 : 0;
  return tape.add(
      tape.scale(tape.nll_categorical(logits, label), alpha),
      tape.scale(tape.nll_multilabel(adversary_probs, flipped), beta));
}

Var multidetask_adversary(Tape& tape, Var adversary_probs,
                          std::span<const int> z) {
  return tape.nll_multilabel(adversary_probs, z);
}

Var advgen_main(Tape& tape, Var logits, int label, Var generator_nll,
                double alpha, double beta) {
  return tape.sub(tape.scale(tape.nll_categorical(logits, label), alpha),
                  tape.scale(generator_nll, beta));
}

Var decluster_pair(Tape& tape, Var r, Var partner_r, std::span<const int> z,
                   std::span<const int> partner_z, double alpha,
                   DeclusterSign sign) {
  double coef = alpha * (0.5 - hamming_normalized(z, partner_z));
  if (sign == DeclusterSign::kNegated) coef = -coef;
  return tape.scale(tape.squared_distance(r, partner_r), coef);
}

}  // namespace objective

namespace {

// A sequence with no known tokens still needs one step through the LSTM.
std::vector<int> encode_nonempty(const Example& ex, const Vocabulary& vocab,
                                 InputSetting setting) {
  auto ids = encode_example(ex, vocab, setting);
  if (ids.empty()) ids.push_back(Vocabulary::kUnk);
  return ids;
}

int argmax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Fraction of correct cells: argmax vs y, or logit >= 0 (p >= 0.5) vs z_j.
double score(const nn::Encoder& encoder, const nn::Head& head,
             const Corpus& corpus, std::span<const std::size_t> positions,
             const std::vector<std::vector<int>>& ids, bool private_target) {
  std::vector<std::vector<int>> seqs;
  seqs.reserve(positions.size());
  for (auto p : positions) seqs.push_back(ids[p]);
  const auto reps = nn::encode_batch(encoder, seqs);
  std::size_t correct = 0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto logits = head.logits(reps[i]);
    const Example& ex = corpus.examples[positions[i]];
    if (private_target) {
      for (std::size_t j = 0; j < ex.z.size(); ++j) {
        correct += (logits[j] >= 0.0 ? 1 : 0) == ex.z[j];
        ++cells;
      }
    } else {
      correct += argmax(logits) == ex.label;
      ++cells;
    }
  }
  if (cells == 0) throw InvalidInputError("accuracy of an empty split");
  return static_cast<double>(correct) / static_cast<double>(cells);
}

}  // namespace

MainTrainer::MainTrainer(const Corpus& corpus, TrainConfig config,
                         bool private_target)
    : corpus_(corpus),
      config_(config),
      private_target_(private_target),
      shuffle_rng_(Rng::splitmix(config.seed ^ 0x5348554646ULL)),
      dropout_rng_(Rng::splitmix(config.seed ^ 0x44524f50ULL)),
      partner_rng_(Rng::splitmix(config.seed ^ 0x50415254ULL)) {
  config_.validate(corpus_);
  if (private_target_ && corpus_.num_attributes() == 0) {
    throw ConfigError("private-attribute classifier needs K > 0");
  }
  if (private_target_ && config_.regime != Regime::kStandard) {
    throw ConfigError("private-attribute classifier uses the standard regime");
  }
  vocabulary_ = Vocabulary::build(corpus_);
  ids_.reserve(corpus_.examples.size());
  for (const auto& ex : corpus_.examples) {
    ids_.push_back(encode_nonempty(ex, vocabulary_, config_.setting));
  }
  train_ = corpus_.indices(Split::kTrain);

  const int d = config_.dim;
  const int outputs =
      private_target_ ? corpus_.num_attributes() : corpus_.num_classes();
  Rng init(Rng::splitmix(config_.seed));
  encoder_ = nn::Encoder(vocabulary_.num_words(), d);
  head_ = nn::Head("head", d, outputs);
  encoder_.init(init);
  head_.init(init);
  main_optimizer_.emplace(
      nn::concat({encoder_.parameters(), head_.parameters()}));

  switch (config_.regime) {
    case Regime::kMultidetask:
      adversary_ = nn::Head("adversary", d, corpus_.num_attributes());
      adversary_.init(init);
      aux_optimizer_.emplace(adversary_.parameters());
      break;
    case Regime::kAdvgen:
      generator_ = nn::CharLm(vocabulary_.num_chars(), d, Vocabulary::kCharBos);
      generator_.init(init);
      aux_optimizer_.emplace(generator_.parameters());
      chars_.resize(corpus_.examples.size());
      for (auto p : train_) {
        chars_[p] = encode_chars(corpus_.examples[p], vocabulary_,
                                 static_cast<std::size_t>(config_.max_chars));
      }
      break;
    case Regime::kDecluster:
      resample_partners();
      break;
    case Regime::kStandard:
      break;
  }
}

void MainTrainer::resample_partners() {
  if (config_.regime != Regime::kDecluster) return;
  partner_.assign(corpus_.examples.size(), 0);
  const std::size_t n = train_.size();
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t j = partner_rng_.below(n - 1);
    if (j >= t) ++j;
    partner_[train_[t]] = train_[j];
  }
}

std::size_t MainTrainer::partner_of(std::size_t example) const {
  if (partner_.empty()) throw ContractViolation("regime has no partners");
  return partner_.at(example);
}

double MainTrainer::train_batch(std::span<const std::size_t> batch) {
  if (batch.empty()) throw InvalidInputError("empty minibatch");
  const std::size_t b = batch.size();
  const double seed = 1.0 / static_cast<double>(b);
  const nn::Dropout drop{config_.dropout, &dropout_rng_};
  const Regime regime = config_.regime;

  std::vector<Tape> tapes(b);
  std::vector<Var> r(b);
  std::vector<Var> partner_r(b);
  for (std::size_t i = 0; i < b; ++i) {
    r[i] = encoder_.encode(tapes[i], ids_.at(batch[i]), Grad::kAccumulate,
                           drop);
    if (regime == Regime::kDecluster) {
      partner_r[i] = encoder_.encode(tapes[i], ids_[partner_.at(batch[i])],
                                     Grad::kAccumulate, drop);
    }
  }

  // Auxiliary step on detached representations: only the adversary or the
  // generator receives gradient.
  if (aux_optimizer_) {
    for (std::size_t i = 0; i < b; ++i) {
      Tape& t = tapes[i];
      const Var fixed = t.detach(r[i]);
      Var loss;
      if (regime == Regime::kMultidetask) {
        loss = objective::multidetask_adversary(
            t, t.sigmoid(adversary_.forward(t, fixed, Grad::kAccumulate)),
            corpus_.examples[batch[i]].z);
      } else {
        loss = generator_.nll(t, chars_.at(batch[i]), fixed,
                              Grad::kAccumulate);
      }
      t.backward(loss, seed);
    }
    aux_optimizer_->step();
    if (observer_) observer_(StepKind::kAuxiliary);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    Tape& t = tapes[i];
    const Example& ex = corpus_.examples[batch[i]];
    const Var logits = head_.forward(t, r[i], Grad::kAccumulate);
    Var loss;
    switch (regime) {
      case Regime::kStandard:
        loss = private_target_
                   ? t.nll_multilabel(t.sigmoid(logits), ex.z)
                   : t.nll_categorical(logits, ex.label);
        break;
      case Regime::kMultidetask:
        loss = objective::multidetask_main(
            t, logits, ex.label,
            t.sigmoid(adversary_.forward(t, r[i], Grad::kFrozen)), ex.z,
            config_.alpha, config_.beta);
        break;
      case Regime::kAdvgen:
        loss = objective::advgen_main(
            t, logits, ex.label,
            generator_.nll(t, chars_.at(batch[i]), r[i], Grad::kFrozen),
            config_.alpha, config_.beta);
        break;
      case Regime::kDecluster:
        loss = t.add(t.nll_categorical(logits, ex.label),
                     objective::decluster_pair(
                         t, r[i], partner_r[i], ex.z,
                         corpus_.examples[partner_[batch[i]]].z,
                         config_.alpha, config_.decluster_sign));
        break;
    }
    total += t.scalar_value(loss);
    t.backward(loss, seed);
  }
  main_optimizer_->step();
  if (observer_) observer_(StepKind::kMain);
  return total / static_cast<double>(b);
}

double MainTrainer::accuracy(Split split) const {
  const auto positions = corpus_.indices(split);
  return score(encoder_, head_, corpus_, positions, ids_, private_target_);
}

MainCheckpoint MainTrainer::snapshot(int epoch, double dev_accuracy) const {
  MainCheckpoint c;
  c.encoder = encoder_;
  c.head = head_;
  c.vocabulary = vocabulary_;
  c.config = config_;
  c.label_names = corpus_.label_names;
  c.attribute_names = corpus_.attribute_names;
  c.attribute_kind = corpus_.attribute_kind;
  c.private_target = private_target_;
  c.dev_accuracy = dev_accuracy;
  c.epoch = epoch;
  c.optimizer = main_optimizer_->state();
  return c;
}

MainCheckpoint MainTrainer::run(const EpochCallback& on_epoch) {
  std::vector<EpochLog> history;
  std::vector<double> dev;
  MainCheckpoint best;
  const std::size_t bs = static_cast<std::size_t>(config_.batch_size);
  for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
    if (epoch > 1) resample_partners();
    std::vector<std::size_t> order = train_;
    shuffle(order, shuffle_rng_);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      const std::span<const std::size_t> batch(order.data() + start,
                                               end - start);
      loss_sum += train_batch(batch) * static_cast<double>(batch.size());
    }
    const EpochLog log{epoch, loss_sum / static_cast<double>(order.size()),
                       accuracy(Split::kDev)};
    history.push_back(log);
    dev.push_back(log.dev_accuracy);
    if (select_best_epoch(dev) == dev.size() - 1) {
      best = snapshot(epoch, log.dev_accuracy);
    }
    if (on_epoch) on_epoch(log);
  }
  best.history = std::move(history);
  return best;
}

MainCheckpoint train_main(const Corpus& corpus, const TrainConfig& config,
                          const EpochCallback& on_epoch) {
  return MainTrainer(corpus, config).run(on_epoch);
}

MainCheckpoint train_standard(const Corpus& corpus, TrainConfig config) {
  config.regime = Regime::kStandard;
  return train_main(corpus, config);
}

MainCheckpoint train_multidetask(const Corpus& corpus, TrainConfig config) {
  config.regime = Regime::kMultidetask;
  return train_main(corpus, config);
}

MainCheckpoint train_advgen(const Corpus& corpus, TrainConfig config) {
  config.regime = Regime::kAdvgen;
  return train_main(corpus, config);
}

MainCheckpoint train_decluster(const Corpus& corpus, TrainConfig config) {
  config.regime = Regime::kDecluster;
  return train_main(corpus, config);
}

MainCheckpoint train_private_classifier(const Corpus& corpus,
                                        TrainConfig config) {
  config.regime = Regime::kStandard;
  return MainTrainer(corpus, config, true).run();
}

std::vector<std::vector<int>> encode_split(const MainCheckpoint& checkpoint,
                                           const Corpus& corpus, Split split) {
  if (corpus.label_names != checkpoint.label_names ||
      corpus.attribute_names != checkpoint.attribute_names) {
    throw SchemaError(
        "corpus labels or attributes do not match the checkpoint vocabulary");
  }
  std::vector<std::vector<int>> ids;
  for (auto p : corpus.indices(split)) {
    ids.push_back(encode_nonempty(corpus.examples[p], checkpoint.vocabulary,
                                  checkpoint.config.setting));
  }
  return ids;
}

std::vector<int> predict_labels(const MainCheckpoint& checkpoint,
                                const std::vector<std::vector<int>>& ids) {
  const auto reps = nn::encode_batch(checkpoint.encoder, ids);
  std::vector<int> out;
  out.reserve(reps.size());
  for (const auto& r : reps) out.push_back(argmax(checkpoint.head.logits(r)));
  return out;
}

RepresentationSet export_representations(const MainCheckpoint& checkpoint,
                                         const Corpus& corpus, Split split) {
  RepresentationSet set;
  set.dim = checkpoint.encoder.dim();
  set.attribute_names = corpus.attribute_names;
  set.r = nn::encode_batch(checkpoint.encoder,
                           encode_split(checkpoint, corpus, split));
  for (auto p : corpus.indices(split)) set.z.push_back(corpus.examples[p].z);
  return set;
}

namespace {

constexpr std::string_view kReprMagic = "# advpriv representations v1";

std::string_view next_line(std::string_view& text) {
  const auto nl = text.find('\n');
  std::string_view line = text.substr(0, nl);
  text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string_view header_field(std::string_view& text, std::string_view key,
                              int line_no) {
  const auto line = next_line(text);
  if (line.substr(0, key.size()) != key || line.size() <= key.size() ||
      line[key.size()] != ' ') {
    throw ParseError("representations line " + std::to_string(line_no) +
                     ": expected '" + std::string(key) + "'");
  }
  return line.substr(key.size() + 1);
}

template <typename T>
T parse_number(std::string_view s, int line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("representations line " + std::to_string(line_no) +
                     ": bad number '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::string format_representations(const RepresentationSet& set) {
  std::string out(kReprMagic);
  out += "\ndim " + std::to_string(set.dim);
  out += "\nattributes " + json(set.attribute_names).dump();
  out += "\ncount " + std::to_string(set.size()) + "\n";
  char buf[32];
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.r[i].size() != static_cast<std::size_t>(set.dim) ||
        set.z[i].size() != set.attribute_names.size()) {
      throw InvalidShapeError("representation record " + std::to_string(i) +
                              " does not match the header");
    }
    for (std::size_t k = 0; k < set.r[i].size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", set.r[i][k]);
      if (k > 0) out += ' ';
      out += buf;
    }
    for (int v : set.z[i]) {
      out += ' ';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

RepresentationSet parse_representations(std::string_view text) {
  RepresentationSet set;
  if (next_line(text) != kReprMagic) {
    throw ParseError("not an advpriv representation file");
  }
  set.dim = parse_number<int>(header_field(text, "dim", 2), 2);
  if (set.dim <= 0) throw ParseError("representations: dim must be positive");
  try {
    set.attribute_names = json::parse(header_field(text, "attributes", 3))
                              .get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("representations line 3: ") + e.what());
  }
  const auto count = parse_number<std::size_t>(header_field(text, "count", 4), 4);
  const std::size_t k = set.attribute_names.size();
  const std::size_t width = static_cast<std::size_t>(set.dim) + k;
  for (std::size_t i = 0; i < count; ++i) {
    const int line_no = static_cast<int>(i) + 5;
    if (text.empty()) {
      throw ParseError("representations: expected " + std::to_string(count) +
                       " records, found " + std::to_string(i));
    }
    std::string_view line = next_line(text);
    std::vector<std::string_view> fields;
    while (!line.empty()) {
      const auto sp = line.find(' ');
      fields.push_back(line.substr(0, sp));
      line.remove_prefix(sp == std::string_view::npos ? line.size() : sp + 1);
    }
    if (fields.size() != width) {
      throw ParseError("representations line " + std::to_string(line_no) +
                       ": expected " + std::to_string(width) + " fields");
    }
    std::vector<double> r(static_cast<std::size_t>(set.dim));
    for (int j = 0; j < set.dim; ++j) {
      r[j] = parse_number<double>(fields[j], line_no);
    }
    std::vector<int> z(k);
    for (std::size_t j = 0; j < k; ++j) {
      z[j] = parse_number<int>(fields[set.dim + j], line_no);
      if (z[j] != 0 && z[j] != 1) {
        throw ParseError("representations line " + std::to_string(line_no) +
                         ": attribute values must be 0 or 1");
      }
    }
    set.r.push_back(std::move(r));
    set.z.push_back(std::move(z));
  }
  if (!text.empty()) throw ParseError("representations: trailing content");
  return set;
}

void write_representations(const RepresentationSet& set,
                           const std::string& path) {
  detail::write_file_atomic(path, format_representations(set));
}

RepresentationSet read_representations(const std::string& path) {
  return parse_representations(detail::read_file(path));
}

namespace {

constexpr std::string_view kMainFormat = "advpriv-main";

json config_to_json(const TrainConfig& c) {
  return {{"regime", to_string(c.regime)},
          {"d", c.dim},
          {"epochs", c.epochs},
          {"batch", c.batch_size},
          {"seed", c.seed},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"setting", to_string(c.setting)},
          {"dropout", c.dropout},
          {"decluster_sign", to_string(c.decluster_sign)},
          {"max_chars", c.max_chars}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.regime = parse_regime(j.at("regime").get<std::string>());
  c.dim = j.at("d").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.setting = parse_input_setting(j.at("setting").get<std::string>());
  c.dropout = j.at("dropout").get<double>();
  c.decluster_sign =
      parse_decluster_sign(j.at("decluster_sign").get<std::string>());
  c.max_chars = j.at("max_chars").get<int>();
  return c;
}

}  // namespace

std::string serialize_checkpoint(const MainCheckpoint& c) {
  json meta;
  meta["config"] = config_to_json(c.config);
  std::vector<std::uint32_t> chars(c.vocabulary.chars().begin(),
                                   c.vocabulary.chars().end());
  meta["vocabulary"] = {{"words", c.vocabulary.words()},
                        {"chars", chars},
                        {"marker_attributes",
                         c.vocabulary.num_marker_attributes()}};
  meta["label_names"] = c.label_names;
  meta["attribute_names"] = c.attribute_names;
  meta["attribute_kind"] = to_string(c.attribute_kind);
  meta["private_target"] = c.private_target;
  meta["dev_accuracy"] = c.dev_accuracy;
  meta["epoch"] = c.epoch;
  auto& history = meta["history"] = json::array();
  for (const auto& h : c.history) {
    history.push_back({h.epoch, h.train_loss, h.dev_accuracy});
  }
  meta["adam_step"] = c.optimizer.step;

  std::vector<detail::NamedArray> arrays;
  const ParameterList params =
      nn::concat({const_cast<nn::Encoder&>(c.encoder).parameters(),
                  const_cast<nn::Head&>(c.head).parameters()});
  for (const Parameter* p : params) detail::store(arrays, *p);
  const bool has_moments = c.optimizer.first_moment.size() == params.size();
  meta["adam_moments"] = has_moments;
  if (has_moments) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      arrays.push_back({"adam.m." + params[i]->name, params[i]->shape(),
                        c.optimizer.first_moment[i]});
      arrays.push_back({"adam.v." + params[i]->name, params[i]->shape(),
                        c.optimizer.second_moment[i]});
    }
  }
  return detail::pack_container(kMainFormat, std::move(meta), arrays);
}

MainCheckpoint deserialize_checkpoint(std::string_view bytes) {
  const auto in = detail::unpack_container(bytes, kMainFormat);
  const json& meta = in.meta;
  MainCheckpoint c;
  try {
    c.config = config_from_json(meta.at("config"));
    const auto& v = meta.at("vocabulary");
    const auto chars = v.at("chars").get<std::vector<std::uint32_t>>();
    c.vocabulary = Vocabulary::from_lists(
        v.at("words").get<std::vector<std::string>>(),
        std::u32string(chars.begin(), chars.end()),
        v.at("marker_attributes").get<int>());
    c.label_names = meta.at("label_names").get<std::vector<std::string>>();
    c.attribute_names =
        meta.at("attribute_names").get<std::vector<std::string>>();
    c.attribute_kind =
        parse_attribute_kind(meta.at("attribute_kind").get<std::string>());
    c.private_target = meta.at("private_target").get<bool>();
    c.dev_accuracy = meta.at("dev_accuracy").get<double>();
    c.epoch = meta.at("epoch").get<int>();
    for (const auto& h : meta.at("history")) {
      c.history.push_back(
          {h.at(0).get<int>(), h.at(1).get<double>(), h.at(2).get<double>()});
    }
    c.optimizer.step = meta.at("adam_step").get<std::int64_t>();

    const int outputs = static_cast<int>(
        c.private_target ? c.attribute_names.size() : c.label_names.size());
    if (c.config.dim <= 0 || outputs <= 0) {
      throw ParseError("checkpoint has an empty model");
    }
    c.encoder = nn::Encoder(c.vocabulary.num_words(), c.config.dim);
    c.head = nn::Head("head", c.config.dim, outputs);
    const ParameterList params = c.parameters();
    for (Parameter* p : params) detail::restore(in, *p);
    if (meta.at("adam_moments").get<bool>()) {
      for (const Parameter* p : params) {
        c.optimizer.first_moment.push_back(
            in.find("adam.m." + p->name, p->shape()).data);
        c.optimizer.second_moment.push_back(
            in.find("adam.v." + p->name, p->shape()).data);
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint metadata: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint metadata: ") + e.what());
  }
  return c;
}

void save_checkpoint(const MainCheckpoint& checkpoint,
                     const std::string& path) {
  detail::write_file_atomic(path, serialize_checkpoint(checkpoint));
}

MainCheckpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(detail::read_file(path));
}

}  // namespace advpriv

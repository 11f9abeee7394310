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

#include "advpriv/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "advpriv/errors.hpp"
#include "advpriv/rng.hpp"

namespace advpriv {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "?";
}

std::string_view to_string(AttributeKind kind) {
  return kind == AttributeKind::kDemographic ? "demographic" : "entity";
}

std::string_view to_string(InputSetting setting) {
  return setting == InputSetting::kRaw ? "raw" : "demo";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw SchemaError("unknown split '" + std::string(s) + "'");
}

AttributeKind parse_attribute_kind(std::string_view s) {
  if (s == "demographic") return AttributeKind::kDemographic;
  if (s == "entity" || s == "ner") return AttributeKind::kEntity;
  throw ConfigError("unknown attribute kind '" + std::string(s) + "'");
}

InputSetting parse_input_setting(std::string_view s) {
  if (s == "raw") return InputSetting::kRaw;
  if (s == "demo" || s == "+demo") return InputSetting::kDemo;
  throw ConfigError("unknown input setting '" + std::string(s) + "'");
}

std::vector<std::size_t> Corpus::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].split == split) out.push_back(i);
  }
  return out;
}

std::size_t Corpus::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(examples.begin(), examples.end(),
                    [split](const Example& e) { return e.split == split; }));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(c < 128 ? static_cast<char>(std::tolower(c)) : ch);
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::u32string decode_utf8(std::string_view text) {
  constexpr char32_t kReplacement = 0xFFFD;
  std::u32string out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + extra >= text.size()) {
      out.push_back(kReplacement);
      break;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

void assign_splits(Corpus& corpus, std::uint64_t seed) {
  const std::size_t n = corpus.examples.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(Rng::splitmix(seed ^ 0x5EED5EEDULL));
  shuffle(order, rng);
  const std::size_t train = n * 8 / 10;
  const std::size_t dev = n / 10;
  for (std::size_t k = 0; k < n; ++k) {
    corpus.examples[order[k]].split =
        k < train ? Split::kTrain
                  : (k < train + dev ? Split::kDev : Split::kTest);
  }
}

std::optional<int> bin_attribute(double value, BinThresholds thresholds) {
  if (value < thresholds.low) return 0;
  if (value > thresholds.high) return 1;
  return std::nullopt;
}

std::optional<int> bin_attribute(std::string_view raw,
                                 BinThresholds thresholds) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size() ||
      !std::isfinite(value)) {
    throw SchemaError("attribute value '" + std::string(raw) +
                      "' is not numeric");
  }
  return bin_attribute(value, thresholds);
}

namespace {

std::string line_prefix(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

// Returns nullopt when binning drops the example.
std::optional<int> attribute_value(const ordered_json& v,
                                   const std::string& name,
                                   const LoadOptions& options,
                                   std::size_t line) {
  const auto bin = options.binning.find(name);
  if (bin != options.binning.end()) {
    if (v.is_number()) return bin_attribute(v.get<double>(), bin->second);
    if (v.is_string()) {
      try {
        return bin_attribute(v.get<std::string>(), bin->second);
      } catch (const SchemaError& e) {
        throw SchemaError(line_prefix(line) + "private." + name + ": " +
                          e.what());
      }
    }
    throw SchemaError(line_prefix(line) + "private." + name +
                      " is not numeric");
  }
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number_integer()) {
    const auto x = v.get<std::int64_t>();
    if (x == 0 || x == 1) return static_cast<int>(x);
  }
  throw SchemaError(line_prefix(line) + "private." + name +
                    " must be 0 or 1");
}

}  // namespace

Corpus parse_jsonl(std::string_view content, const LoadOptions& options) {
  struct Raw {
    Example example;
    std::string label;
    bool has_split = false;
  };
  std::vector<Raw> rows;
  std::vector<std::string> names;
  bool any_split = false;
  bool all_split = true;

  std::size_t line_no = 0;
  while (!content.empty()) {
    const auto eol = content.find('\n');
    const std::string_view line = content.substr(0, eol);
    content = eol == std::string_view::npos ? std::string_view{}
                                            : content.substr(eol + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_prefix(line_no) + e.what());
    }
    if (!record.is_object()) {
      throw ParseError(line_prefix(line_no) + "expected a JSON object");
    }
    for (const char* field : {"text", "label", "private"}) {
      if (!record.contains(field)) {
        throw SchemaError(line_prefix(line_no) + "missing field '" + field +
                          "'");
      }
    }
    if (!record["text"].is_string()) {
      throw SchemaError(line_prefix(line_no) + "field 'text' must be a string");
    }
    if (!record["label"].is_string()) {
      throw SchemaError(line_prefix(line_no) +
                        "field 'label' must be a string");
    }
    const ordered_json& priv = record["private"];
    if (!priv.is_object()) {
      throw SchemaError(line_prefix(line_no) +
                        "field 'private' must be an object");
    }

    std::vector<std::string> keys;
    for (const auto& item : priv.items()) keys.push_back(item.key());
    if (rows.empty() && names.empty()) {
      names = keys;
    } else if (std::set<std::string>(keys.begin(), keys.end()) !=
               std::set<std::string>(names.begin(), names.end())) {
      throw SchemaError(line_prefix(line_no) +
                        "private attributes differ from the first record");
    }

    Raw raw;
    raw.example.text = record["text"].get<std::string>();
    raw.example.tokens = tokenize(raw.example.text);
    if (raw.example.tokens.empty()) {
      throw SchemaError(line_prefix(line_no) + "field 'text' has no tokens");
    }
    raw.example.chars = decode_utf8(raw.example.text);
    raw.label = record["label"].get<std::string>();
    bool keep = true;
    for (const auto& name : names) {
      const auto value = attribute_value(priv[name], name, options, line_no);
      if (!value) {
        keep = false;
        break;
      }
      raw.example.z.push_back(*value);
    }
    if (record.contains("split")) {
      if (!record["split"].is_string()) {
        throw SchemaError(line_prefix(line_no) +
                          "field 'split' must be a string");
      }
      try {
        raw.example.split = parse_split(record["split"].get<std::string>());
      } catch (const SchemaError& e) {
        throw SchemaError(line_prefix(line_no) + e.what());
      }
      raw.has_split = true;
    }
    any_split = any_split || raw.has_split;
    all_split = all_split && raw.has_split;
    if (keep) rows.push_back(std::move(raw));
  }

  if (any_split && !all_split) {
    throw SchemaError("either every record or no record must carry 'split'");
  }

  Corpus corpus;
  corpus.attribute_names = names;
  corpus.attribute_kind = options.attribute_kind;
  std::set<std::string> labels;
  for (const auto& r : rows) labels.insert(r.label);
  corpus.label_names.assign(labels.begin(), labels.end());
  for (auto& r : rows) {
    const auto it = std::lower_bound(corpus.label_names.begin(),
                                     corpus.label_names.end(), r.label);
    r.example.label = static_cast<int>(it - corpus.label_names.begin());
    corpus.examples.push_back(std::move(r.example));
  }
  if (!any_split) assign_splits(corpus, options.split_seed);
  return corpus;
}

Corpus load_jsonl(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_jsonl(buffer.str(), options);
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const Example& e : corpus.examples) {
    ordered_json record;
    record["text"] = e.text;
    record["label"] = corpus.label_names.at(e.label);
    ordered_json priv = ordered_json::object();
    for (std::size_t j = 0; j < corpus.attribute_names.size(); ++j) {
      priv[corpus.attribute_names[j]] = e.z.at(j);
    }
    record["private"] = priv;
    record["split"] = std::string(to_string(e.split));
    out += record.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write corpus " + path);
  out << to_jsonl(corpus);
  if (!out) throw IoError("failed writing corpus " + path);
}

std::string marker_token(std::string_view attribute, int value) {
  return "<" + std::string(attribute) + "=" + std::to_string(value) + ">";
}

Vocabulary Vocabulary::build(const Corpus& corpus, int min_count) {
  std::unordered_map<std::string, int> counts;
  std::set<char32_t> chars;
  for (const Example& e : corpus.examples) {
    if (e.split != Split::kTrain) continue;
    for (const auto& t : e.tokens) ++counts[t];
    chars.insert(e.chars.begin(), e.chars.end());
  }
  std::vector<std::pair<std::string, int>> ranked;
  for (const auto& [word, count] : counts) {
    if (count >= min_count) ranked.emplace_back(word, count);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::vector<std::string> words{"<unk>"};
  const int marker_attributes =
      corpus.attribute_kind == AttributeKind::kDemographic
          ? corpus.num_attributes()
          : 0;
  for (int j = 0; j < marker_attributes; ++j) {
    words.push_back(marker_token(corpus.attribute_names[j], 0));
    words.push_back(marker_token(corpus.attribute_names[j], 1));
  }
  std::set<std::string> reserved(words.begin(), words.end());
  for (auto& [word, count] : ranked) {
    if (!reserved.count(word)) words.push_back(word);
  }
  std::u32string char_list{U'\0', U'\0'};  // UNK, BOS placeholders
  char_list.append(chars.begin(), chars.end());
  return from_lists(std::move(words), std::move(char_list),
                    marker_attributes);
}

Vocabulary Vocabulary::from_lists(std::vector<std::string> words,
                                  std::u32string chars,
                                  int marker_attributes) {
  if (words.empty() || chars.size() < 2 ||
      static_cast<int>(words.size()) < 1 + 2 * marker_attributes) {
    throw SchemaError("vocabulary is missing reserved entries");
  }
  Vocabulary v;
  v.words_ = std::move(words);
  v.chars_ = std::move(chars);
  for (int j = 0; j < marker_attributes; ++j) {
    v.markers_.emplace_back(1 + 2 * j, 2 + 2 * j);
  }
  v.index();
  return v;
}

void Vocabulary::index() {
  word_index_.clear();
  char_index_.clear();
  for (std::size_t i = 1; i < words_.size(); ++i) {
    word_index_.emplace(words_[i], static_cast<int>(i));
  }
  for (std::size_t i = 2; i < chars_.size(); ++i) {
    char_index_.emplace(chars_[i], static_cast<int>(i));
  }
}

int Vocabulary::word_id(std::string_view word) const {
  const auto it = word_index_.find(std::string(word));
  return it == word_index_.end() ? kUnk : it->second;
}

int Vocabulary::char_id(char32_t c) const {
  const auto it = char_index_.find(c);
  return it == char_index_.end() ? kCharUnk : it->second;
}

int Vocabulary::marker_id(int attribute, int value) const {
  if (attribute < 0 || attribute >= static_cast<int>(markers_.size())) {
    throw IndexError("no marker tokens for attribute " +
                     std::to_string(attribute));
  }
  return value != 0 ? markers_[attribute].second : markers_[attribute].first;
}

std::vector<int> encode_example(const Example& example,
                                const Vocabulary& vocabulary,
                                InputSetting setting) {
  std::vector<int> ids;
  ids.reserve(example.tokens.size() + example.z.size());
  if (setting == InputSetting::kDemo) {
    if (!vocabulary.has_markers() ||
        vocabulary.num_marker_attributes() !=
            static_cast<int>(example.z.size())) {
      throw ConfigError(
          "+demo input needs demographic private attributes in the corpus");
    }
    for (std::size_t j = 0; j < example.z.size(); ++j) {
      ids.push_back(vocabulary.marker_id(static_cast<int>(j), example.z[j]));
    }
  }
  for (const auto& t : example.tokens) ids.push_back(vocabulary.word_id(t));
  return ids;
}

std::vector<int> encode_chars(const Example& example,
                              const Vocabulary& vocabulary,
                              std::size_t max_chars) {
  const std::size_t n = max_chars == 0
                            ? example.chars.size()
                            : std::min(max_chars, example.chars.size());
  std::vector<int> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = vocabulary.char_id(example.chars[i]);
  }
  return ids;
}

namespace {

const std::vector<std::string>& synth_keys() {
  static const std::vector<std::string> keys{
      "vocab_size",   "classes",       "attributes",     "examples",
      "label_signal", "private_signal", "correlation",   "seed",
      "min_length",   "max_length",    "class_words",    "marker_words"};
  return keys;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

SynthConfig SynthConfig::from_config(const KeyValueConfig& config) {
  config.require_known(synth_keys());
  SynthConfig c;
  auto get_int = [&](const char* key, int fallback) {
    const auto v = config.get_int(key, fallback);
    if (v < INT32_MIN || v > INT32_MAX) {
      throw ConfigError(std::string("config key ") + key + " out of range");
    }
    return static_cast<int>(v);
  };
  c.vocab_size = get_int("vocab_size", c.vocab_size);
  c.classes = get_int("classes", c.classes);
  c.attributes = get_int("attributes", c.attributes);
  c.examples = get_int("examples", c.examples);
  c.label_signal = config.get_double("label_signal", c.label_signal);
  c.private_signal = config.get_double("private_signal", c.private_signal);
  c.correlation = config.get_double("correlation", c.correlation);
  const auto seed = config.get_int("seed", static_cast<std::int64_t>(c.seed));
  if (seed < 0) throw ConfigError("config key seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.min_length = get_int("min_length", c.min_length);
  c.max_length = get_int("max_length", c.max_length);
  c.class_words = get_int("class_words", c.class_words);
  c.marker_words = get_int("marker_words", c.marker_words);
  c.validate();
  return c;
}

KeyValueConfig SynthConfig::to_config() const {
  KeyValueConfig c;
  c.set("vocab_size", std::to_string(vocab_size));
  c.set("classes", std::to_string(classes));
  c.set("attributes", std::to_string(attributes));
  c.set("examples", std::to_string(examples));
  c.set("label_signal", format_double(label_signal));
  c.set("private_signal", format_double(private_signal));
  c.set("correlation", format_double(correlation));
  c.set("seed", std::to_string(seed));
  c.set("min_length", std::to_string(min_length));
  c.set("max_length", std::to_string(max_length));
  c.set("class_words", std::to_string(class_words));
  c.set("marker_words", std::to_string(marker_words));
  return c;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("synth: " + m); };
  if (vocab_size < 1) fail("vocab_size must be >= 1");
  if (classes < 2) fail("classes must be >= 2");
  if (attributes < 0) fail("attributes must be >= 0");
  if (examples < 1) fail("examples must be >= 1");
  if (!(label_signal >= 0.0 && label_signal <= 1.0)) {
    fail("label_signal must be in [0, 1]");
  }
  if (!(private_signal >= 0.0 && private_signal <= 1.0)) {
    fail("private_signal must be in [0, 1]");
  }
  if (!(correlation >= -1.0 && correlation <= 1.0)) {
    fail("correlation must be in [-1, 1]");
  }
  if (correlation != 0.0 && classes % 2 != 0) {
    fail("a nonzero correlation needs an even class count so that the "
         "class-half indicator is balanced");
  }
  if (min_length < 1 || max_length < min_length) {
    fail("need 1 <= min_length <= max_length");
  }
  if (class_words < 1 || marker_words < 1) {
    fail("class_words and marker_words must be >= 1");
  }
}

std::string synth_class_word(int label, int k) {
  return "c" + std::to_string(label) + "_" + std::to_string(k);
}

std::string synth_marker_word(int attribute, int value, int k) {
  return "z" + std::to_string(attribute) + "v" + std::to_string(value) + "_" +
         std::to_string(k);
}

std::string synth_noise_word(int k) { return "w" + std::to_string(k); }

Corpus synth_generate(const SynthConfig& config) {
  config.validate();
  Corpus corpus;
  for (int c = 0; c < config.classes; ++c) {
    corpus.label_names.push_back("class" + std::to_string(c));
  }
  for (int j = 0; j < config.attributes; ++j) {
    corpus.attribute_names.push_back("attr" + std::to_string(j));
  }
  corpus.attribute_kind = AttributeKind::kDemographic;

  Rng rng(config.seed);
  const double strength = std::abs(config.correlation);
  corpus.examples.reserve(static_cast<std::size_t>(config.examples));
  for (int n = 0; n < config.examples; ++n) {
    Example e;
    e.label = static_cast<int>(rng.below(config.classes));
    const int half = e.label >= config.classes / 2 ? 1 : 0;
    for (int j = 0; j < config.attributes; ++j) {
      int value = 0;
      if (strength > 0.0 && rng.bernoulli(strength)) {
        value = config.correlation > 0.0 ? half : 1 - half;
      } else {
        value = rng.bernoulli(0.5) ? 1 : 0;
      }
      e.z.push_back(value);
    }

    const int length = config.min_length +
                       static_cast<int>(rng.below(static_cast<std::uint64_t>(
                           config.max_length - config.min_length + 1)));
    std::vector<std::string> words;
    words.reserve(static_cast<std::size_t>(length + config.attributes));
    for (int i = 0; i < length; ++i) {
      if (rng.bernoulli(config.label_signal)) {
        words.push_back(synth_class_word(
            e.label, static_cast<int>(rng.below(config.class_words))));
      } else {
        words.push_back(
            synth_noise_word(static_cast<int>(rng.below(config.vocab_size))));
      }
    }
    for (int j = 0; j < config.attributes; ++j) {
      if (!rng.bernoulli(config.private_signal)) continue;
      const auto position = static_cast<std::ptrdiff_t>(rng.below(words.size() + 1));
      words.insert(words.begin() + position,
                   synth_marker_word(j, e.z[j],
                                     static_cast<int>(
                                         rng.below(config.marker_words))));
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) e.text += ' ';
      e.text += words[i];
    }
    e.tokens = std::move(words);
    e.chars = decode_utf8(e.text);
    corpus.examples.push_back(std::move(e));
  }
  assign_splits(corpus, config.seed);
  return corpus;
}

Baseline most_frequent_baseline(std::span<const int> train_values,
                                std::span<const int> eval_values) {
  if (train_values.empty() || eval_values.empty()) {
    throw InvalidInputError("most-frequent baseline needs nonempty splits");
  }
  std::map<int, std::size_t> counts;
  for (int v : train_values) ++counts[v];
  int best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [value, count] : counts) {
    if (count > best_count) {
      best = value;
      best_count = count;
    }
  }
  const auto hits = std::count(eval_values.begin(), eval_values.end(), best);
  return {best, static_cast<double>(hits) /
                    static_cast<double>(eval_values.size())};
}

Baseline most_frequent_baseline(const Corpus& corpus, int attribute,
                                Split eval_split) {
  if (attribute >= corpus.num_attributes()) {
    throw IndexError("attribute " + std::to_string(attribute) +
                     " out of range");
  }
  std::vector<int> train;
  std::vector<int> eval;
  for (const Example& e : corpus.examples) {
    const int v = attribute < 0 ? e.label : e.z[attribute];
    if (e.split == Split::kTrain) train.push_back(v);
    if (e.split == eval_split) eval.push_back(v);
  }
  return most_frequent_baseline(train, eval);
}

}  // namespace advpriv

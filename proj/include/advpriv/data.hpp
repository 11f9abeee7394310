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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "advpriv/config.hpp"

namespace advpriv {

enum class Split : std::uint8_t { kTrain, kDev, kTest };
enum class AttributeKind : std::uint8_t { kDemographic, kEntity };
enum class InputSetting : std::uint8_t { kRaw, kDemo };

std::string_view to_string(Split split);
std::string_view to_string(AttributeKind kind);
std::string_view to_string(InputSetting setting);
Split parse_split(std::string_view s);
AttributeKind parse_attribute_kind(std::string_view s);
InputSetting parse_input_setting(std::string_view s);

// One labeled text with its private attribute vector z.
struct Example {
  std::string text;
  std::vector<std::string> tokens;
  std::u32string chars;
  int label = 0;
  std::vector<int> z;
  Split split = Split::kTrain;
};

struct Corpus {
  std::vector<Example> examples;
  std::vector<std::string> label_names;
  std::vector<std::string> attribute_names;
  AttributeKind attribute_kind = AttributeKind::kDemographic;

  int num_classes() const { return static_cast<int>(label_names.size()); }
  int num_attributes() const {
    return static_cast<int>(attribute_names.size());
  }
  // Positions of the examples in `split`, in corpus order.
  std::vector<std::size_t> indices(Split split) const;
  std::size_t count(Split split) const;
};

// Lowercases ASCII letters and splits on whitespace.
std::vector<std::string> tokenize(std::string_view text);

// Decodes UTF-8; invalid bytes become U+FFFD.
std::u32string decode_utf8(std::string_view text);

// Assigns train/dev/test by a seeded shuffle: the first floor(0.8 n) shuffled
// positions train, the next floor(0.1 n) dev, the rest test.
void assign_splits(Corpus& corpus, std::uint64_t seed);

// Lower/upper cut points for binning a numeric attribute. Values strictly
// below `low` map to 0, strictly above `high` to 1, anything else is dropped.
struct BinThresholds {
  double low = 0.0;
  double high = 0.0;
};

std::optional<int> bin_attribute(double value, BinThresholds thresholds);
// Throws SchemaError when `raw` is not a number.
std::optional<int> bin_attribute(std::string_view raw,
                                 BinThresholds thresholds);

struct LoadOptions {
  std::uint64_t split_seed = 0;
  AttributeKind attribute_kind = AttributeKind::kDemographic;
  // Attributes given as raw numbers (e.g. age) and how to binarize them.
  std::map<std::string, BinThresholds> binning;
};

// Reads a JSON Lines corpus: {"text", "label", "private": {name: 0|1},
// optional "split"}. Label ids follow sorted label names; attributes keep the
// key order of the first record. Throws ParseError (with line number) for
// malformed JSON and SchemaError for missing fields or inconsistent keys.
Corpus load_jsonl(const std::string& path, const LoadOptions& options = {});
Corpus parse_jsonl(std::string_view content, const LoadOptions& options = {});

void write_jsonl(const Corpus& corpus, const std::string& path);
std::string to_jsonl(const Corpus& corpus);

// Word and character ids. Word ids: 0 is UNK, then two marker tokens per
// demographic attribute ("<name=0>", "<name=1>"), then training-split words
// with at least `min_count` occurrences by descending count, ties
// alphabetical. Char ids: 0 is UNK, 1 is BOS, then training-split characters
// in code point order.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kCharUnk = 0;
  static constexpr int kCharBos = 1;
  static constexpr int kDefaultMinCount = 2;

  static Vocabulary build(const Corpus& corpus,
                          int min_count = kDefaultMinCount);

  int word_id(std::string_view word) const;
  int char_id(char32_t c) const;
  // Throws IndexError for an attribute without markers.
  int marker_id(int attribute, int value) const;
  bool has_markers() const { return !markers_.empty(); }

  int num_words() const { return static_cast<int>(words_.size()); }
  int num_chars() const { return static_cast<int>(chars_.size()); }
  const std::vector<std::string>& words() const { return words_; }
  const std::u32string& chars() const { return chars_; }
  int num_marker_attributes() const {
    return static_cast<int>(markers_.size());
  }

  // Rebuilds lookup tables from serialized lists.
  static Vocabulary from_lists(std::vector<std::string> words,
                               std::u32string chars, int marker_attributes);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.chars_ == b.chars_ &&
           a.markers_ == b.markers_;
  }

 private:
  void index();

  std::vector<std::string> words_;
  std::u32string chars_;
  std::vector<std::pair<int, int>> markers_;  // (id for 0, id for 1)
  std::unordered_map<std::string, int> word_index_;
  std::unordered_map<char32_t, int> char_index_;
};

std::string marker_token(std::string_view attribute, int value);

// Token ids for the encoder. kDemo prepends one marker per attribute.
// Throws ConfigError for kDemo on a corpus without demographic attributes.
std::vector<int> encode_example(const Example& example,
                                const Vocabulary& vocabulary,
                                InputSetting setting);

// Character ids for the generator, truncated to `max_chars` (0 = no limit).
std::vector<int> encode_chars(const Example& example,
                              const Vocabulary& vocabulary,
                              std::size_t max_chars);

// Parameters of the synthetic corpus generator. Every field has a key of the
// same name in the flat config file format.
struct SynthConfig {
  int vocab_size = 200;           // noise words
  int classes = 2;
  int attributes = 2;             // K
  int examples = 1000;
  double label_signal = 0.3;      // chance a position holds a class word
  double private_signal = 0.5;    // chance each z_j marker is inserted
  double correlation = 0.0;       // target corr(z_j, class half)
  std::uint64_t seed = 1;
  int min_length = 8;
  int max_length = 16;
  int class_words = 5;            // distinct indicative words per class
  int marker_words = 3;           // distinct markers per (attribute, value)

  static SynthConfig from_config(const KeyValueConfig& config);
  KeyValueConfig to_config() const;
  // Throws ConfigError for out-of-range or unsatisfiable settings.
  void validate() const;
};

// Generates a corpus with uniform classes and uniform z. Each z_j copies the
// class-half indicator (y >= classes / 2) with probability |correlation|,
// inverted when correlation < 0, and is a fair coin otherwise. Tokens mix
// class words (probability label_signal per position) with noise words, and
// one marker word for (j, z_j) is inserted with probability private_signal
// per attribute. Splits are assigned with the generator seed.
Corpus synth_generate(const SynthConfig& config);

std::string synth_class_word(int label, int k);
std::string synth_marker_word(int attribute, int value, int k);
std::string synth_noise_word(int k);

struct Baseline {
  int prediction = 0;
  double accuracy = 0.0;
};

// Majority value of `train_values` (ties to the lower value) and its accuracy
// on `eval_values`. Throws InvalidInputError for empty inputs.
Baseline most_frequent_baseline(std::span<const int> train_values,
                                std::span<const int> eval_values);

// attribute < 0 selects the main label; otherwise private attribute j.
Baseline most_frequent_baseline(const Corpus& corpus, int attribute,
                                Split eval_split);

}  // namespace advpriv

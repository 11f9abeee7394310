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

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "advpriv/attack.hpp"
#include "advpriv/config.hpp"
#include "advpriv/data.hpp"
#include "advpriv/errors.hpp"
#include "advpriv/training.hpp"

namespace advpriv::cli {
namespace {

namespace fs = std::filesystem;

// Flag values land in a key=value map so that config files and flags share
// one parser; flags given on the command line override the file.
class Settings {
 public:
  void bind(CLI::App* app, const std::string& flag, const std::string& key,
            const std::string& help) {
    options_.emplace_back(key, app->add_option(flag, raw_[key], help));
  }

  void bind_flag(CLI::App* app, const std::string& flag,
                 const std::string& key, const std::string& help) {
    flags_.emplace_back(key, app->add_flag(flag, help));
  }

  // Keys accepted in the config file without a matching flag.
  void allow(std::vector<std::string> keys) { extra_known_ = std::move(keys); }

  void bind_config(CLI::App* app) {
    app->add_option("--config", config_path_,
                    "key = value file; command-line flags take precedence");
  }

  KeyValueConfig resolve() const {
    KeyValueConfig kv;
    if (!config_path_.empty()) {
      kv = KeyValueConfig::load(config_path_);
      std::vector<std::string> known = extra_known_;
      for (const auto& [key, opt] : options_) known.push_back(key);
      for (const auto& [key, opt] : flags_) known.push_back(key);
      kv.require_known(known);
    }
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) kv.set(key, raw_.at(key));
    }
    for (const auto& [key, opt] : flags_) {
      if (opt->count() > 0) kv.set(key, "true");
    }
    return kv;
  }

 private:
  std::map<std::string, std::string> raw_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
  std::vector<std::pair<std::string, CLI::Option*>> flags_;
  std::vector<std::string> extra_known_;
  std::string config_path_;
};

bool get_bool(const KeyValueConfig& kv, const std::string& key) {
  const std::string v = kv.get_string(key, "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' must be true or false, got '" + v + "'");
}

std::string require(const KeyValueConfig& kv, const std::string& key) {
  const auto v = kv.get(key);
  if (!v || v->empty()) {
    throw ConfigError("missing required setting '" + key + "'");
  }
  return *v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::int64_t to_int(const std::string& s, const std::string& what) {
  KeyValueConfig kv;
  kv.set(what, s);
  return kv.get_int(what, 0);
}

void bind_corpus_options(Settings& s, CLI::App* app) {
  s.bind(app, "--corpus", "corpus", "JSONL corpus");
  s.bind(app, "--attribute-kind", "attribute_kind",
         "demographic (privacy 1 - mean accuracy) or entity (1 - F)");
  s.bind(app, "--split-seed", "split_seed",
         "seed for the 80/10/10 split when records carry none");
  s.bind(app, "--bin", "bin",
         "binarize numeric attributes, e.g. age=35:45 (comma separated)");
}

Corpus load_corpus(const KeyValueConfig& kv) {
  LoadOptions options;
  options.split_seed =
      static_cast<std::uint64_t>(kv.get_int("split_seed", 0));
  options.attribute_kind =
      parse_attribute_kind(kv.get_string("attribute_kind", "demographic"));
  for (const auto& item : split_list(kv.get_string("bin", ""))) {
    const auto eq = item.find('=');
    const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos) {
      throw ConfigError("bin must look like name=low:high, got '" + item +
                        "'");
    }
    KeyValueConfig t;
    t.set("low", item.substr(eq + 1, colon - eq - 1));
    t.set("high", item.substr(colon + 1));
    options.binning[item.substr(0, eq)] =
        BinThresholds{t.get_double("low", 0), t.get_double("high", 0)};
  }
  return load_jsonl(require(kv, "corpus"), options);
}

void bind_train_options(Settings& s, CLI::App* app, bool grid) {
  if (!grid) s.bind(app, "--regime", "regime",
                    "standard, multidetask, advgen or decluster");
  if (!grid) s.bind(app, "--d", "d", "representation size");
  if (!grid) s.bind(app, "--seed", "seed", "training seed");
  s.bind(app, "--setting", "setting", "input setting: raw or demo");
  s.bind(app, "--alpha", "alpha", "main-task weight (decluster: pair weight)");
  s.bind(app, "--beta", "beta", "adversarial term weight");
  s.bind(app, "--epochs", "epochs", "training epochs");
  s.bind(app, "--batch", "batch", "minibatch size");
  s.bind(app, "--dropout", "dropout", "dropout rate on LSTM inputs");
  s.bind(app, "--decluster-sign", "decluster_sign", "as-printed or negated");
  s.bind(app, "--max-chars", "max_chars",
         "generator input truncation (0 = none)");
}

TrainConfig train_config(const KeyValueConfig& kv, Regime regime) {
  TrainConfig c = TrainConfig::for_regime(regime);
  c.dim = static_cast<int>(kv.get_int("d", c.dim));
  c.epochs = static_cast<int>(kv.get_int("epochs", c.epochs));
  c.batch_size = static_cast<int>(kv.get_int("batch", c.batch_size));
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));
  c.alpha = kv.get_double("alpha", c.alpha);
  c.beta = kv.get_double("beta", c.beta);
  c.setting = parse_input_setting(kv.get_string("setting", "raw"));
  c.dropout = kv.get_double("dropout", c.dropout);
  c.decluster_sign = parse_decluster_sign(
      kv.get_string("decluster_sign", std::string(to_string(c.decluster_sign))));
  c.max_chars = static_cast<int>(kv.get_int("max_chars", c.max_chars));
  return c;
}

void bind_attack_options(Settings& s, CLI::App* app) {
  s.bind(app, "--attack-epochs", "attack_epochs", "attacker epochs (16)");
  s.bind(app, "--attack-batch", "attack_batch", "attacker minibatch size");
  s.bind(app, "--f-averaging", "f_averaging",
         "entity F-score averaging: micro or macro");
  s.bind_flag(app, "--shuffle-reprs", "shuffle_reprs",
              "permute r across examples (control experiment)");
  s.bind_flag(app, "--upper-bound", "upper_bound",
              "also train the encoder directly on z (slow)");
}

AttackOptions attack_options(const KeyValueConfig& kv, std::uint64_t seed) {
  AttackOptions o;
  o.attack.epochs = static_cast<int>(kv.get_int("attack_epochs", 16));
  o.attack.batch_size = static_cast<int>(kv.get_int("attack_batch", 16));
  o.attack.seed = seed;
  const std::string avg = kv.get_string("f_averaging", "micro");
  if (avg != "micro" && avg != "macro") {
    throw ConfigError("f_averaging must be micro or macro");
  }
  o.attack.averaging = avg == "macro" ? FAveraging::kMacro : FAveraging::kMicro;
  o.shuffle_representations = get_bool(kv, "shuffle_reprs");
  o.upper_bound = get_bool(kv, "upper_bound");
  return o;
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

// corr(z_j, class-half indicator) over the whole corpus.
double half_correlation(const Corpus& c, int attribute) {
  const int half = c.num_classes() / 2;
  double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto& e : c.examples) {
    const double x = e.z[attribute];
    const double y = e.label >= half ? 1.0 : 0.0;
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  if (vx <= 0 || vy <= 0) return 0.0;
  return (sxy - sx * sy / n) / std::sqrt(vx * vy);
}

int cmd_synth(const KeyValueConfig& kv, std::ostream& out) {
  KeyValueConfig synth;
  for (const auto& [key, value] : kv.values()) {
    if (key != "out") synth.set(key, value);
  }
  const SynthConfig config = SynthConfig::from_config(synth);
  const std::string path = require(kv, "out");
  const Corpus corpus = synth_generate(config);
  ensure_parent(path);
  write_jsonl(corpus, path);

  out << "wrote " << corpus.examples.size() << " examples to " << path
      << "\n";
  out << "splits: train " << corpus.count(Split::kTrain) << ", dev "
      << corpus.count(Split::kDev) << ", test " << corpus.count(Split::kTest)
      << "\n";
  std::vector<std::size_t> per_class(corpus.label_names.size());
  for (const auto& e : corpus.examples) ++per_class[e.label];
  out << "classes:";
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    out << " " << corpus.label_names[k] << "="
        << fixed(static_cast<double>(per_class[k]) /
                     static_cast<double>(corpus.examples.size()),
                 3);
  }
  out << "\n";
  for (int j = 0; j < corpus.num_attributes(); ++j) {
    out << corpus.attribute_names[j] << ": corr(z, y) = "
        << fixed(half_correlation(corpus, j), 3) << "\n";
  }
  return 0;
}

int cmd_train(const KeyValueConfig& kv, std::ostream& out) {
  const Regime regime = parse_regime(kv.get_string("regime", "standard"));
  const TrainConfig config = train_config(kv, regime);
  const std::string path = require(kv, "out");
  const Corpus corpus = load_corpus(kv);
  const MainCheckpoint ck =
      train_main(corpus, config, [&](const EpochLog& log) {
        out << "epoch " << log.epoch << "  train_loss "
            << fixed(log.train_loss) << "  dev_accuracy "
            << fixed(log.dev_accuracy) << "\n"
            << std::flush;
      });
  ensure_parent(path);
  save_checkpoint(ck, path);
  out << "selected epoch " << ck.epoch << " (dev accuracy "
      << fixed(ck.dev_accuracy) << "), checkpoint " << path << "\n";
  return 0;
}

int cmd_attack(const KeyValueConfig& kv, std::ostream& out) {
  const MainCheckpoint ck = load_checkpoint(require(kv, "checkpoint"));
  const Corpus corpus = load_corpus(kv);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(
                                                        ck.config.seed)));
  const AttackOptions options = attack_options(kv, seed);
  const std::string path = require(kv, "out");

  if (const auto dir = kv.get("reprs_dir"); dir && !dir->empty()) {
    fs::create_directories(*dir);
    for (Split split : {Split::kTrain, Split::kDev, Split::kTest}) {
      write_representations(
          export_representations(ck, corpus, split),
          (fs::path(*dir) / (std::string(to_string(split)) + ".reprs"))
              .string());
    }
  }
  const PrivacyReport report = run_attack(ck, corpus, options);
  ensure_parent(path);
  save_report(report, path);
  out << report.table();
  out << "attacker epoch " << report.attacker_epoch << " (dev privacy "
      << fixed(report.attacker_dev_privacy) << "), report " << path << "\n";
  return 0;
}

struct Cell {
  Regime regime;
  int dim;
  std::uint64_t seed;
  fs::path dir;
};

PrivacyReport run_cell(const Cell& cell, const Corpus& corpus,
                       const KeyValueConfig& kv, bool& resumed) {
  const fs::path report_path = cell.dir / "report.txt";
  const fs::path checkpoint_path = cell.dir / "checkpoint.bin";
  resumed = false;
  if (fs::exists(report_path)) {
    resumed = true;
    return load_report(report_path.string());
  }
  fs::create_directories(cell.dir);
  MainCheckpoint ck;
  if (fs::exists(checkpoint_path)) {
    ck = load_checkpoint(checkpoint_path.string());
  } else {
    TrainConfig config = train_config(kv, cell.regime);
    config.dim = cell.dim;
    config.seed = cell.seed;
    ck = train_main(corpus, config);
    save_checkpoint(ck, checkpoint_path.string());
  }
  const PrivacyReport report =
      run_attack(ck, corpus, attack_options(kv, cell.seed));
  save_report(report, report_path.string());
  return report;
}

int cmd_grid(const KeyValueConfig& kv, std::ostream& out, std::ostream& err) {
  const Corpus corpus = load_corpus(kv);
  const fs::path root = require(kv, "out");
  std::vector<Regime> regimes;
  for (const auto& r : split_list(kv.get_string("regimes", "standard"))) {
    regimes.push_back(parse_regime(r));
  }
  std::vector<int> dims;
  for (const auto& d : split_list(kv.get_string("dims", "8,16,32,64,128"))) {
    dims.push_back(static_cast<int>(to_int(d, "dims")));
    if (dims.back() <= 0) throw ConfigError("dims must be positive");
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& s : split_list(kv.get_string("seeds", "0"))) {
    seeds.push_back(static_cast<std::uint64_t>(to_int(s, "seeds")));
  }
  if (regimes.empty() || dims.empty() || seeds.empty()) {
    throw ConfigError("grid needs at least one regime, dimension and seed");
  }
  // Reject bad shared settings before any cell starts.
  for (Regime r : regimes) train_config(kv, r).validate(corpus);
  attack_options(kv, 0);

  std::vector<Cell> cells;
  for (Regime r : regimes) {
    for (int d : dims) {
      for (auto s : seeds) {
        cells.push_back({r, d, s,
                         root / std::string(to_string(r)) /
                             ("d" + std::to_string(d)) /
                             ("seed" + std::to_string(s))});
      }
    }
  }
  fs::create_directories(root);

  const auto hw = std::max(1u, std::thread::hardware_concurrency());
  const int jobs = static_cast<int>(kv.get_int("jobs", hw));
  if (jobs <= 0) throw ConfigError("jobs must be positive");

  std::vector<std::optional<PrivacyReport>> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      const std::string name = std::string(to_string(cell.regime)) + " d=" +
                               std::to_string(cell.dim) +
                               " seed=" + std::to_string(cell.seed);
      try {
        bool resumed = false;
        results[i] = run_cell(cell, corpus, kv, resumed);
        std::lock_guard lock(io);
        out << (resumed ? "skipped (done) " : "finished ") << name
            << "  main " << fixed(results[i]->main_accuracy) << "  privacy "
            << fixed(results[i]->privacy) << "\n"
            << std::flush;
      } catch (const std::exception& e) {
        std::lock_guard lock(io);
        err << "cell " << name << " failed: " << e.what() << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min<int>(jobs, static_cast<int>(cells.size()));
       ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) t.join();

  std::vector<GridRow> rows;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!results[i]) {
      ++failed;
      continue;
    }
    rows.push_back({std::string(to_string(cells[i].regime)), cells[i].dim,
                    cells[i].seed, results[i]->main_accuracy,
                    results[i]->privacy});
  }
  const auto test = corpus.indices(Split::kTest);
  std::vector<std::vector<int>> gold;
  for (auto p : test) gold.push_back(corpus.examples[p].z);
  const double baseline_main =
      most_frequent_baseline(corpus, -1, Split::kTest).accuracy;
  const double baseline_privacy =
      corpus.num_attributes() == 0
          ? 0.0
          : privacy_score(most_frequent_predictions(corpus, Split::kTest), gold,
                          corpus.attribute_kind,
                          attack_options(kv, 0).attack.averaging);
  const std::string table =
      summary_table(rows, baseline_main, baseline_privacy);
  {
    std::ofstream summary(root / "summary.txt", std::ios::trunc);
    summary << table;
    if (!summary) throw IoError("cannot write " + (root / "summary.txt").string());
  }
  out << table;
  if (failed > 0) {
    err << failed << " of " << cells.size() << " cells failed\n";
    return 1;
  }
  return 0;
}

void collect_reports(const fs::path& path, std::vector<fs::path>& found) {
  if (fs::is_directory(path)) {
    std::vector<fs::path> here;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().filename() == "report.txt") {
        here.push_back(entry.path());
      }
    }
    std::sort(here.begin(), here.end());
    found.insert(found.end(), here.begin(), here.end());
  } else if (fs::exists(path)) {
    found.push_back(path);
  } else {
    throw IoError("no such report or directory: " + path.string());
  }
}

int cmd_report(const std::vector<std::string>& paths, std::ostream& out) {
  std::vector<fs::path> files;
  for (const auto& p : paths) collect_reports(p, files);
  if (files.empty()) throw IoError("no report.txt files found");
  std::vector<PrivacyReport> reports;
  for (const auto& f : files) reports.push_back(load_report(f.string()));
  if (reports.size() == 1) {
    out << reports[0].table();
    return 0;
  }
  std::vector<GridRow> rows;
  for (const auto& r : reports) {
    rows.push_back({r.regime, r.dim, r.seed, r.main_accuracy, r.privacy});
  }
  out << summary_table(rows, reports[0].main_baseline_accuracy,
                       reports[0].baseline_privacy);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Adversarial privacy for text representations", "advpriv"};
  app.require_subcommand(1);

  Settings synth_s, train_s, attack_s, grid_s;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_s.bind_config(synth);
  {
    std::vector<std::string> keys;
    const KeyValueConfig defaults = SynthConfig{}.to_config();
    for (const auto& [key, value] : defaults.values()) {
      keys.push_back(key);
    }
    synth_s.allow(std::move(keys));
  }
  synth_s.bind(synth, "--seed", "seed", "generator seed");
  synth_s.bind(synth, "--examples", "examples", "number of examples");
  synth_s.bind(synth, "--out", "out", "output JSONL path");

  CLI::App* train = app.add_subcommand("train", "train the main classifier");
  train_s.bind_config(train);
  bind_corpus_options(train_s, train);
  bind_train_options(train_s, train, false);
  train_s.bind(train, "--out", "out", "checkpoint path");

  CLI::App* attack =
      app.add_subcommand("attack", "train an attacker on frozen representations");
  attack_s.bind_config(attack);
  bind_corpus_options(attack_s, attack);
  attack_s.bind(attack, "--checkpoint", "checkpoint", "main checkpoint");
  attack_s.bind(attack, "--seed", "seed",
                "attacker seed (default: the checkpoint's seed)");
  bind_attack_options(attack_s, attack);
  attack_s.bind(attack, "--reprs-dir", "reprs_dir",
                "also write train/dev/test representation files here");
  attack_s.bind(attack, "--out", "out", "privacy report path");

  CLI::App* grid = app.add_subcommand("grid", "train and attack every cell");
  grid_s.bind_config(grid);
  bind_corpus_options(grid_s, grid);
  grid_s.bind(grid, "--regimes", "regimes", "comma-separated regimes");
  grid_s.bind(grid, "--dims", "dims", "comma-separated sizes (8,16,32,64,128)");
  grid_s.bind(grid, "--seeds", "seeds", "comma-separated seeds (0)");
  bind_train_options(grid_s, grid, true);
  bind_attack_options(grid_s, grid);
  grid_s.bind(grid, "--jobs", "jobs", "cells run in parallel (all cores)");
  grid_s.bind(grid, "--out", "out", "output directory");

  CLI::App* report = app.add_subcommand("report", "render saved reports");
  std::vector<std::string> report_paths;
  report->add_option("paths", report_paths, "report files or grid directories")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_s.resolve(), out);
    if (train->parsed()) return cmd_train(train_s.resolve(), out);
    if (attack->parsed()) return cmd_attack(attack_s.resolve(), out);
    if (grid->parsed()) return cmd_grid(grid_s.resolve(), out, err);
    if (report->parsed()) return cmd_report(report_paths, out);
  } catch (const std::exception& e) {
    err << "advpriv: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace advpriv::cli

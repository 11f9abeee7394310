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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "advpriv/attack.hpp"
#include "advpriv/data.hpp"
#include "advpriv/training.hpp"

namespace advpriv {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("advpriv_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const {
    return (dir_ / name).string();
  }

  // Small corpus with short documents so training finishes quickly.
  std::string corpus(int examples = 300, int attributes = 2) {
    const std::string config = path("synth.cfg");
    std::ofstream(config) << "vocab_size = 40\nmin_length = 4\n"
                          << "max_length = 8\nprivate_signal = 0.8\n"
                          << "attributes = " << attributes << "\n";
    const std::string out = path("corpus_" + std::to_string(attributes) +
                                 ".jsonl");
    const auto r = run({"synth", "--config", config, "--examples",
                        std::to_string(examples), "--out", out});
    EXPECT_EQ(r.code, 0) << r.err;
    return out;
  }

  fs::path dir_;
};

TEST_F(Cli, SynthIsDeterministicAndSplits) {
  const auto a = run({"synth", "--seed", "1", "--examples", "1000", "--out",
                      path("a.jsonl")});
  const auto b = run({"synth", "--seed", "1", "--examples", "1000", "--out",
                      path("b.jsonl")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_NE(a.out.find("splits: train 800, dev 100, test 100"),
            std::string::npos)
      << a.out;
  EXPECT_NE(a.out.find("corr(z, y)"), std::string::npos);
}

TEST_F(Cli, SynthCorrelationOnTenThousandExamples) {
  std::ofstream(path("rho.cfg")) << "correlation = 0.6\nexamples = 10000\n";
  const auto r = run({"synth", "--config", path("rho.cfg"), "--out",
                      path("rho.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Corpus c = load_jsonl(path("rho.jsonl"));
  double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto& e : c.examples) {
    const double x = e.z[0];
    const double y = e.label;
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double corr = (sxy - sx * sy / n) /
                      std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  EXPECT_NEAR(corr, 0.6, 0.05);
  EXPECT_NE(r.out.find("attr0: corr(z, y) = 0.5"), std::string::npos) << r.out;
}

TEST_F(Cli, SynthRejectsInvalidConfig) {
  std::ofstream(path("bad.cfg")) << "private_signal = 1.5\n";
  const auto r =
      run({"synth", "--config", path("bad.cfg"), "--out", path("x.jsonl")});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(fs::exists(path("x.jsonl")));
}

TEST_F(Cli, TrainAttackAndExportWidth) {
  const std::string c = corpus();
  const auto t = run({"train", "--corpus", c, "--d", "8", "--epochs", "2",
                      "--out", path("m.bin")});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("epoch 2  train_loss"), std::string::npos);
  EXPECT_NE(t.out.find("selected epoch"), std::string::npos);

  const std::vector<std::string> attack{
      "attack",           "--checkpoint", path("m.bin"), "--corpus", c,
      "--attack-epochs",  "3",            "--reprs-dir",  path("reprs")};
  auto first = attack;
  first.insert(first.end(), {"--out", path("r1.txt")});
  auto second = attack;
  second.insert(second.end(), {"--out", path("r2.txt")});
  const auto a1 = run(first);
  ASSERT_EQ(a1.code, 0) << a1.err;
  const std::string reprs = slurp(path("reprs/test.reprs"));
  const auto a2 = run(second);
  ASSERT_EQ(a2.code, 0) << a2.err;
  EXPECT_EQ(slurp(path("r1.txt")), slurp(path("r2.txt")));
  EXPECT_EQ(slurp(path("reprs/test.reprs")), reprs);
  EXPECT_NE(a1.out.find("most frequent"), std::string::npos);

  const auto set = read_representations(path("reprs/test.reprs"));
  EXPECT_EQ(set.dim, 8);
  for (const auto& r : set.r) EXPECT_EQ(r.size(), 8u);

  const auto report = load_report(path("r1.txt"));
  EXPECT_GE(report.privacy, 0.0);
  EXPECT_LE(report.privacy, 1.0);
  EXPECT_NEAR(report.privacy,
              1.0 - 0.5 * (report.attacker_accuracy[0] +
                           report.attacker_accuracy[1]),
              1e-15);
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  const std::string c = corpus();
  std::ofstream(path("train.cfg")) << "d = 16\nepochs = 1\nregime = decluster\n";
  const auto r = run({"train", "--config", path("train.cfg"), "--corpus", c,
                      "--d", "8", "--out", path("m.bin")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ck = load_checkpoint(path("m.bin"));
  EXPECT_EQ(ck.config.dim, 8);
  EXPECT_EQ(ck.config.epochs, 1);
  EXPECT_EQ(ck.config.regime, Regime::kDecluster);
  EXPECT_EQ(ck.config.alpha, 0.1);
}

TEST_F(Cli, ConfigErrorsExitNonzero) {
  const std::string no_attrs = corpus(200, 0);
  const auto md = run({"train", "--corpus", no_attrs, "--regime",
                       "multidetask", "--epochs", "1", "--out", path("m.bin")});
  EXPECT_NE(md.code, 0);
  EXPECT_NE(md.err.find("K = 0"), std::string::npos) << md.err;
  EXPECT_FALSE(fs::exists(path("m.bin")));

  std::ofstream(path("typo.cfg")) << "epoch = 3\n";
  const auto typo = run({"train", "--config", path("typo.cfg"), "--corpus",
                         no_attrs, "--out", path("m.bin")});
  EXPECT_NE(typo.code, 0);
  EXPECT_NE(typo.err.find("epoch"), std::string::npos) << typo.err;

  const auto missing = run({"train", "--corpus", path("nope.jsonl"), "--out",
                            path("m.bin")});
  EXPECT_NE(missing.code, 0);
  EXPECT_NE(run({"train", "--d", "x", "--corpus", no_attrs, "--out",
                 path("m.bin")}).code,
            0);
  EXPECT_NE(run({}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, AttackRejectsIncompatibleCorpus) {
  const std::string c = corpus();
  const std::string other = corpus(200, 1);
  ASSERT_EQ(run({"train", "--corpus", c, "--d", "8", "--epochs", "1", "--out",
                 path("m.bin")}).code,
            0);
  const auto r = run({"attack", "--checkpoint", path("m.bin"), "--corpus",
                      other, "--out", path("r.txt")});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, GridTableResumeAndIsolation) {
  const std::string c = corpus(200);
  const std::vector<std::string> grid{
      "grid",     "--corpus", c,        "--regimes", "standard,multidetask",
      "--dims",   "4,8",      "--seeds", "0",        "--epochs",
      "1",        "--attack-epochs",     "2",        "--jobs",
      "2",        "--out",    path("grid")};
  const auto first = run(grid);
  ASSERT_EQ(first.code, 0) << first.err;
  std::vector<std::string> lines;
  std::stringstream table(slurp(path("grid/summary.txt")));
  for (std::string line; std::getline(table, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);  // header, baseline, 2 x 2 cells
  EXPECT_EQ(lines[1].rfind("most frequent", 0), 0u);
  for (int i : {2, 3}) {
    EXPECT_EQ(lines[i].rfind("standard", 0), 0u);
    std::stringstream row(lines[i]);
    std::vector<std::string> cells;
    for (std::string w; row >> w;) cells.push_back(w);
    ASSERT_EQ(cells.size(), 7u);
    EXPECT_EQ(cells[4], "+0.0");
    EXPECT_EQ(cells[6], "+0.0");
  }
  EXPECT_TRUE(fs::exists(path("grid/multidetask/d8/seed0/checkpoint.bin")));

  // Resume: completed cells are skipped and the summary is unchanged.
  const std::string summary = slurp(path("grid/summary.txt"));
  const auto again = run(grid);
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(again.out.find("finished"), std::string::npos);
  EXPECT_NE(again.out.find("skipped (done) standard d=4 seed=0"),
            std::string::npos);
  EXPECT_EQ(slurp(path("grid/summary.txt")), summary);

  // A damaged cell fails alone; the others keep their outputs.
  const std::string kept = slurp(path("grid/standard/d8/seed0/report.txt"));
  fs::remove(path("grid/standard/d4/seed0/report.txt"));
  std::ofstream(path("grid/standard/d4/seed0/checkpoint.bin")) << "garbage";
  const auto damaged = run(grid);
  EXPECT_NE(damaged.code, 0);
  EXPECT_NE(damaged.err.find("standard d=4 seed=0 failed"), std::string::npos)
      << damaged.err;
  EXPECT_EQ(slurp(path("grid/standard/d8/seed0/report.txt")), kept);

  const auto report = run({"report", path("grid")});
  ASSERT_EQ(report.code, 0) << report.err;
  EXPECT_NE(report.out.find("multidetask"), std::string::npos);
  const auto single = run({"report", path("grid/standard/d8/seed0/report.txt")});
  ASSERT_EQ(single.code, 0) << single.err;
  EXPECT_NE(single.out.find("regime=standard d=8"), std::string::npos);
}

}  // namespace
}  // namespace advpriv

/*
 * Copyright 2026 The asyrec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "asyrec/checkpoint.hpp"
#include "asyrec/dataset.hpp"
#include "asyrec/io.hpp"
#include "commands.hpp"

namespace asyrec {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult asyrec(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("asyrec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::vector<std::string> kTinyData = {"--dim", "4", "--dyads-per-class", "3", "--clips", "4"};
const std::vector<std::string> kTinyTrain = {"--max-epochs", "2", "--lr", "1e-2", "--kfold", "3"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST_F(CliTest, GenDataDefaultShape) {
  const CliResult r = asyrec({"gen-data", "--classes", "4", "--dyads-per-class", "24", "--clips", "12", "--dim",
                              "16", "--seed", "7", "-o", path("data.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Dataset ds = load_dataset(path("data.tsv"));
  EXPECT_EQ(ds.dyads.size(), 96u);
  EXPECT_EQ(ds.clip_total(), 1152u);
  EXPECT_NE(r.out.find("1152"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(path("data.tsv.config.txt")));
}

TEST_F(CliTest, InvalidValuesExitTwoNamingTheConstraint) {
  CliResult r = asyrec({"gen-data", "--classes", "1", "-o", path("x.tsv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--classes must be at least 2"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("x.tsv")));

  r = asyrec({"gen-data", "--no-such-flag", "3"});
  EXPECT_EQ(r.code, 2);
  r = asyrec({"frobnicate"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, UnknownAblationKindExitsTwo) {
  ASSERT_EQ(asyrec(cat({"gen-data", "-o", path("d.tsv")}, kTinyData)).code, 0);
  const CliResult r = asyrec({"ablate", "-d", path("d.tsv"), "--run", path("run"), "--kind", "bogus"});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.err.find("temporal_parity"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingInputFileExitsOne) {
  const CliResult r = asyrec({"train", "-d", path("absent.tsv"), "--out", path("run")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("absent.tsv"), std::string::npos) << r.err;
}

TEST_F(CliTest, FlagsOverrideConfigFileOverridesDefaults) {
  io::write_file_atomic(path("cfg.txt"), "seed = 3\n[gen-data]\ndim = 3\nclips = 5\n[train]\nlr = 0.5\n");
  ASSERT_EQ(asyrec({"gen-data", "--config", path("cfg.txt"), "--dyads-per-class", "3", "-o", path("a.tsv")}).code, 0);
  Dataset a = load_dataset(path("a.tsv"));
  EXPECT_EQ(a.feature_dim, 3u);
  EXPECT_EQ(a.dyads.begin()->second.clip_count, 5u);
  const std::string a_cfg = io::read_file(path("a.tsv.config.txt"));
  EXPECT_NE(a_cfg.find("seed = 3"), std::string::npos) << a_cfg;

  ASSERT_EQ(asyrec({"gen-data", "--config", path("cfg.txt"), "--dyads-per-class", "3", "--dim", "6", "-o",
                    path("b.tsv")})
                .code,
            0);
  EXPECT_EQ(load_dataset(path("b.tsv")).feature_dim, 6u);
  EXPECT_EQ(load_dataset(path("b.tsv")).dyads.begin()->second.clip_count, 5u);

  io::write_file_atomic(path("bad.txt"), "[gen-data]\ndimension = 3\n");
  const CliResult bad = asyrec({"gen-data", "--config", path("bad.txt"), "-o", path("c.tsv")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("dimension"), std::string::npos) << bad.err;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_file(e.path());
  return files;
}

TEST_F(CliTest, EveryCommandIsByteIdenticalOnRerun) {
  const std::string root = path("w");
  auto run_all = [&] {
    const std::string data = root + "/data.tsv";
    ASSERT_EQ(asyrec(cat({"gen-data", "--seed", "4", "--out", root}, kTinyData)).code, 0);
    ASSERT_EQ(asyrec(cat({"train", "-d", data, "--seed", "4", "--out", root + "/run"}, kTinyTrain)).code, 0);
    ASSERT_EQ(asyrec({"eval", "-d", data, "-c", root + "/run/fold0.ckpt", "--out", root + "/eval"}).code, 0);
    ASSERT_EQ(asyrec({"ablate", "-d", data, "--run", root + "/run", "--kind", "no_edge_att,segment", "--seed", "4",
                      "--out", root + "/abl"})
                  .code,
              0);
    ASSERT_EQ(asyrec({"report", "--run", root + "/run", "--ablation", root + "/abl/ablation.csv", "--out",
                      root + "/rep"})
                  .code,
              0);
  };
  run_all();
  const auto first = snapshot(root);
  fs::remove_all(root);
  run_all();
  const auto second = snapshot(root);
  ASSERT_EQ(first.size(), second.size());
  for (const auto& [name, body] : first) {
    ASSERT_TRUE(second.contains(name)) << name;
    EXPECT_TRUE(second.at(name) == body) << name << " differs between runs";
  }
  EXPECT_GE(first.size(), 10u);
}

TEST_F(CliTest, TrainingArtifactsAreComplete) {
  ASSERT_EQ(asyrec(cat({"gen-data", "--out", path("")}, kTinyData)).code, 0);
  const CliResult r = asyrec(cat({"train", "-d", path("data.tsv"), "--out", path("run")}, kTinyTrain));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"fold0.ckpt", "fold1.ckpt", "fold2.ckpt", "folds.tsv", "history.csv", "report.json",
                        "config.txt"})
    EXPECT_TRUE(fs::exists(path("run/") + f)) << f;
  const std::string report = io::read_file(path("run/report.json"));
  EXPECT_NE(report.find("\"config_hash\""), std::string::npos);
  const std::string history = io::read_file(path("run/history.csv"));
  EXPECT_EQ(history.rfind("# asyrec-report v1", 0), 0u) << history.substr(0, 80);
  const AsyrecParams p = load_checkpoint(path("run/fold1.ckpt"));
  EXPECT_EQ(p.dim, 4u);
}

TEST_F(CliTest, EvalRejectsSchemaMismatch) {
  ASSERT_EQ(asyrec(cat({"gen-data", "-o", path("noxi.tsv")}, kTinyData)).code, 0);
  ASSERT_EQ(asyrec(cat({"gen-data", "--classes", "2", "--bidirectional", "false", "-o", path("udiva.tsv")},
                       kTinyData))
                .code,
            0);
  ASSERT_EQ(asyrec(cat({"train", "-d", path("noxi.tsv"), "--out", path("run")}, kTinyTrain)).code, 0);
  const CliResult r = asyrec({"eval", "-d", path("udiva.tsv"), "-c", path("run/fold0.ckpt"), "--out", path("e")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("schema"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace asyrec

// Copyright 2026 The datlime Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"
#include "datlime/error.hpp"

namespace datlime::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

TEST(Settings, DefaultsAndOverrides) {
  Settings s;
  EXPECT_EQ(s.get("run.seed"), "7");
  EXPECT_EQ(s.get("explain.target_k"), "40");
  s.set("train.epochs", "3");
  EXPECT_EQ(s.get("train.epochs"), "3");
  EXPECT_THROW(s.set("train.nonsense", "1"), ValidationError);
  EXPECT_THROW(s.set("train.epochs", "three"), ValidationError);
  EXPECT_THROW(s.set("calibrate.criterion", "youden"), ValidationError);
}

TEST(Settings, IniMergeAndRoundTrip) {
  Settings s;
  s.merge_ini("# comment\n[train]\nepochs = 4\n[explain]\nn_samples=250\n");
  EXPECT_EQ(s.get("train.epochs"), "4");
  EXPECT_EQ(s.get("explain.n_samples"), "250");
  Settings t;
  t.merge_ini(s.to_ini());
  EXPECT_EQ(t.canonical(), s.canonical());
  EXPECT_EQ(config_hash(t), config_hash(s));
  EXPECT_NE(config_hash(s), config_hash(Settings{}));
  EXPECT_EQ(config_hash(s).size(), 16u);
  EXPECT_THROW(s.merge_ini("[train]\nepochs\n"), ValidationError);
}

TEST(Settings, ResolveChecksRatios) {
  Settings s;
  s.set("prep.val_ratio", "0.3");
  EXPECT_THROW(resolve(s), ValidationError);
  const auto rc = resolve(Settings{});
  EXPECT_EQ(rc.seed, 7u);
  EXPECT_EQ(rc.n_pd, 430u);
  EXPECT_EQ(rc.criterion, Criterion::GMean);
  EXPECT_EQ(rc.calibrate_on, Partition::Validation);
  EXPECT_NE(rc.provenance_comment().find("config_hash=" + rc.hash), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({"gen", "--n-pd", "many"}).code, kExitUsage);
}

TEST(Cli, ValidationErrorExitCode) {
  const auto dir = fresh_dir("datlime_cli_validation");
  EXPECT_EQ(invoke({"--run-dir", dir.string(), "--set", "train.nope=1", "gen"}).code, kExitValidation);
  EXPECT_EQ(invoke({"--run-dir", dir.string(), "--threshold-criterion", "youden", "calibrate"}).code, kExitUsage);
}

TEST(Cli, SelftestMatchesAllTables) {
  const auto r = invoke({"selftest"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("tables: 4/4 matched"), std::string::npos) << r.out;
  const auto f = invoke({"selftest", "--fixtures", DATLIME_FIXTURE_DIR});
  EXPECT_EQ(f.code, kExitOk) << f.err;
}

TEST(Cli, CalibrateOnGoldenRocTable) {
  const auto dir = fresh_dir("datlime_cli_fixture");
  const auto r = invoke({"--run-dir", dir.string(), "calibrate", "--fixture", "table6"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("0.8335"), std::string::npos) << r.out;
}

TEST(Cli, SmallPipelineProducesArtifactsWithProvenance) {
  const auto dir = fresh_dir("datlime_cli_pipeline");
  const std::vector<std::string> common{"--run-dir", dir.string(), "--seed", "3", "--set", "train.steps_train=4",
                                        "--set", "explain.n_samples=60", "--set", "explain.target_k=12"};
  auto stage = [&](std::vector<std::string> extra) {
    auto args = common;
    args.insert(args.end(), extra.begin(), extra.end());
    const auto r = invoke(args);
    EXPECT_EQ(r.code, kExitOk) << extra.front() << ": " << r.err;
    return r;
  };
  stage({"gen", "--n-pd", "40", "--n-hc", "20"});
  stage({"prep"});
  stage({"train", "--epochs", "1"});
  stage({"predict"});
  stage({"calibrate"});
  stage({"explain", "--count", "2"});
  const auto report = stage({"report"});

  for (const char* f : {"manifest.csv", "split.csv", "history.csv", "predictions.csv", "roc.csv", "pr.csv",
                        "explanations.csv"}) {
    const auto text = slurp(dir / f);
    EXPECT_EQ(text.rfind("# config_hash=", 0), 0u) << f;
  }
  const auto cal = nlohmann::json::parse(slurp(dir / "calibration.json"));
  EXPECT_EQ(cal["calibrated_on"], "val");
  EXPECT_EQ(cal["criterion"], "g_mean");
  EXPECT_TRUE(cal.contains("provenance"));
  const auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(rep.contains("provenance"));
  EXPECT_TRUE(fs::exists(dir / "model.ckpt"));
  std::size_t overlays = 0;
  for (const auto& e : fs::directory_iterator(dir / "overlays")) overlays += e.path().extension() == ".png";
  EXPECT_EQ(overlays, 2u);
  EXPECT_FALSE(report.out.empty());
}

}  // namespace
}  // namespace datlime::cli

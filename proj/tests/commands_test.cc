// Copyright 2026 The Authors.
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

#include "vxcode/commands.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vxcode/heatmap.h"

namespace vxcode {
namespace {

namespace fs = std::filesystem;

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ =
        fs::temp_directory_path() /
        ("vxcode_cmd_" +
         std::string(
             ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunConfig Additive(const std::string& extra = "") {
    return ParseRunConfig(ConfigFile::Parse(
        "[detector]\nweights = [0.5, 0.3, 0.2]\nbox = [0, 0, 30, 10]\n"
        "num_classes = 3\n[image]\nwidth = 30\nheight = 10\n"
        "[grid]\nrows = 1\ncols = 3\n[reward]\nvariant = \"class_only\"\n"
        "[output]\ndir = \"" +
        dir_.string() + "\"\n" + extra));
  }

  std::string Read(const std::string& name) {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CommandsTest, ExplainWritesTraceHeatMapAndSummary) {
  ASSERT_EQ(CmdExplain(Additive(), out_, err_), kExitOk) << err_.str();
  std::istringstream trace_text(Read("trace.tsv"));
  const ExplanationTrace trace = ReadTrace(trace_text);
  EXPECT_EQ(trace.Order(), (std::vector<PatchIndex>{0, 1, 2}));
  EXPECT_EQ(trace.mode, Mode::kInsertion);
  EXPECT_TRUE(fs::exists(dir_ / "heatmap.pgm"));
  EXPECT_EQ(ReadHeatMapCsv((dir_ / "heatmap.csv").string()).at(0, 0), 1.0);
  const std::string summary = Read("summary.tsv");
  for (const char* key : {"n\t3", "r\t1", "L\t30", "gamma\t0.1",
                          "evaluations\t6", "final_reward\t1"}) {
    EXPECT_NE(summary.find(key), std::string::npos) << key;
  }
}

TEST_F(CommandsTest, ExplainDeletion) {
  ASSERT_EQ(CmdExplain(Additive("[engine]\nmode = \"deletion\"\n"), out_, err_),
            kExitOk);
  std::istringstream trace_text(Read("trace.tsv"));
  const ExplanationTrace trace = ReadTrace(trace_text);
  EXPECT_EQ(trace.mode, Mode::kDeletion);
  EXPECT_EQ(trace.Order(), (std::vector<PatchIndex>{0, 1, 2}));
  EXPECT_EQ(trace.steps.back().reward_after, 0.0);
}

TEST_F(CommandsTest, ExplainIsByteDeterministic) {
  ASSERT_EQ(CmdExplain(Additive(), out_, err_), kExitOk);
  const std::string a = Read("trace.tsv") + Read("heatmap.csv");
  ASSERT_EQ(CmdExplain(Additive(), out_, err_), kExitOk);
  EXPECT_EQ(Read("trace.tsv") + Read("heatmap.csv"), a);
}

TEST_F(CommandsTest, MissingImageIsAUsageErrorNamingThePath) {
  RunConfig c = Additive();
  c.image_path = "/no/such/picture.png";
  EXPECT_EQ(CmdExplain(c, out_, err_), kExitUsage);
  EXPECT_NE(err_.str().find("/no/such/picture.png"), std::string::npos);
}

TEST_F(CommandsTest, SidecarLaunchFailureIsARuntimeError) {
  RunConfig c = Additive();
  c.detector.kind = DetectorKind::kSidecar;
  c.detector.command = "exit 3";
  EXPECT_EQ(CmdExplain(c, out_, err_), kExitRuntime);
  EXPECT_NE(err_.str().find("error[transport]"), std::string::npos);
}

TEST_F(CommandsTest, EvaluateTrace) {
  ASSERT_EQ(CmdExplain(Additive(), out_, err_), kExitOk);
  ASSERT_EQ(CmdEvaluate(Additive(), (dir_ / "trace.tsv").string(), out_, err_),
            kExitOk)
      << err_.str();
  const std::string csv = Read("metrics.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "insertion_auc,deletion_auc,overall,pointing_game,"
            "energy_pointing_game");
  std::istringstream row(csv.substr(csv.find('\n') + 1));
  double ins, del;
  char comma;
  row >> ins >> comma >> del;
  EXPECT_NEAR(ins, 0.6, 1e-12);
  // Deletion curve 1, .5, .2, 0.
  EXPECT_NEAR(del, (1.5 + 0.7 + 0.2) / 6, 1e-12);
  for (const char* label : {"insertion AUC", "deletion AUC", "over-all",
                            "pointing game", "energy pointing game"}) {
    EXPECT_NE(out_.str().find(label), std::string::npos) << label;
  }
}

TEST_F(CommandsTest, EvaluateUniformHeatMapQuarterBox) {
  HeatMap map(30, 10, 0.5);
  ExportRaster(map, (dir_ / "u.pgm").string(), (dir_ / "u.csv").string());
  ASSERT_EQ(CmdEvaluate(Additive("[ground_truth]\nbox = [0, 0, 15, 5]\n"),
                        (dir_ / "u.csv").string(), out_, err_),
            kExitOk)
      << err_.str();
  const std::string csv = Read("metrics.csv");
  EXPECT_EQ(csv.substr(csv.rfind(',') + 1), "0.25\n");
}

TEST_F(CommandsTest, EvaluateRejectsMismatchedInput) {
  HeatMap map(8, 8, 0.5);
  ExportRaster(map, (dir_ / "m.pgm").string(), (dir_ / "m.csv").string());
  EXPECT_EQ(CmdEvaluate(Additive(), (dir_ / "m.csv").string(), out_, err_),
            kExitUsage);
  EXPECT_EQ(CmdEvaluate(Additive(), (dir_ / "none.tsv").string(), out_, err_),
            kExitUsage);
}

TEST_F(CommandsTest, OracleExitCodes) {
  EXPECT_EQ(CmdOracle(6, 100, 1, false, out_, err_), kExitOk);
  EXPECT_NE(out_.str().find("max_residual"), std::string::npos);
  EXPECT_EQ(CmdOracle(4, 5, 1, true, out_, err_), kExitVerification);
  EXPECT_EQ(CmdOracle(21, 1, 1, false, out_, err_), kExitUsage);
  EXPECT_NE(err_.str().find("error[size]"), std::string::npos);
}

TEST_F(CommandsTest, BiasBenchDefaultScenario) {
  BiasBenchOptions o;
  o.seed = 3;
  o.output_dir = dir_.string();
  EXPECT_EQ(CmdBiasBench(o, out_, err_), kExitOk);
  const BiasBenchReport r = RunBiasBench(o);
  EXPECT_EQ(r.n, 64u);
  EXPECT_EQ(r.window, 7u);
  EXPECT_LE(r.marker_position, 2u);
  EXPECT_TRUE(r.InstanceInWindow());
  EXPECT_TRUE(fs::exists(dir_ / "trace.tsv"));
  EXPECT_TRUE(fs::exists(dir_ / "heatmap.pgm"));
}

TEST_F(CommandsTest, BiasBenchControls) {
  BiasBenchOptions o;
  o.seed = 3;
  o.beta = 0.0;
  const BiasBenchReport none = RunBiasBench(o);
  EXPECT_FALSE(none.MarkerInWindow());
  EXPECT_EQ(CmdBiasBench(o, out_, err_), kExitOk);

  o.beta = 0.5;
  o.with_instance = false;
  const BiasBenchReport alone = RunBiasBench(o);
  EXPECT_EQ(alone.marker_position, 1u);
  EXPECT_EQ(CmdBiasBench(o, out_, err_), kExitOk);
}

}  // namespace
}  // namespace vxcode

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

#include "vxcode/detector.h"

#include <gtest/gtest.h>

#include <vector>

#include "test_support.h"
#include "vxcode/commands.h"
#include "vxcode/random.h"

namespace vxcode {
namespace {

class AdditiveDetectorTest : public ::testing::Test {
 protected:
  Image image_ = SyntheticImage(30, 10, 3, 1);
  PatchGrid grid_{30, 10, 1, 3};
  DetectorHandle detector_{MakeAdditiveDetector(image_, grid_, {0.5, 0.3, 0.2},
                                                {0, 0, 30, 10}, 0, 3)};

  double Target(const PatchSet& keep) {
    const auto out = detector_.DetectMasked(image_, grid_, keep);
    EXPECT_EQ(out.size(), 1u);
    return out.front().probs[0];
  }
};

TEST_F(AdditiveDetectorTest, FullImageSumsAllWeights) {
  const auto out = detector_.Detect(image_);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out.front().probs[0], 1.0);
  EXPECT_EQ(out.front().box, (BBox{0, 0, 30, 10}));
  EXPECT_EQ(out.front().probs[1], kProbabilityFloor);
}

TEST_F(AdditiveDetectorTest, MaskedSums) {
  EXPECT_DOUBLE_EQ(Target({0}), 0.5);
  EXPECT_DOUBLE_EQ(Target({1, 2}), 0.5);
  EXPECT_DOUBLE_EQ(Target({}), 0.0);
  EXPECT_DOUBLE_EQ(Target({0, 1, 2}), 1.0);
}

TEST_F(AdditiveDetectorTest, CountsEveryCall) {
  detector_.ResetEvaluations();
  detector_.Detect(image_);
  detector_.DetectMasked(image_, grid_, {0});
  const std::vector<PatchSet> keeps = {{0}, {1}, {2}, {0, 1}};
  detector_.DetectMaskedBatch(image_, grid_, keeps);
  EXPECT_EQ(detector_.evaluations(), 6u);
}

TEST(AdditiveDetector, ClampsAtOne) {
  const Image image = SyntheticImage(20, 10, 3, 2);
  const PatchGrid grid(20, 10, 1, 2);
  DetectorHandle d(
      MakeAdditiveDetector(image, grid, {0.8, 0.7}, {0, 0, 20, 10}, 1, 2));
  EXPECT_DOUBLE_EQ(d.Detect(image).front().probs[1], 1.0);
}

TEST(AdditiveDetector, RejectsNegativeWeights) {
  const Image image = SyntheticImage(20, 10, 3, 2);
  EXPECT_THROW(MakeAdditiveDetector(image, PatchGrid(20, 10, 1, 2), {0.1, -0.1},
                                    {0, 0, 20, 10}, 0, 2),
               std::invalid_argument);
}

TEST(BiasedDetector, MarkerAndInstanceContributions) {
  const Image image = SyntheticImage(64, 64, 3, 4);
  const PatchGrid grid(64, 64, 8, 8);
  const BBox box{16, 16, 48, 48};
  std::vector<double> w(64, 0.0);
  w[18] = 0.25;
  w[45] = 0.25;
  DetectorHandle d(MakeBiasedDetector(image, grid, w, 7, 0.5, box, 0, 3));
  auto target = [&](const PatchSet& keep) {
    return d.DetectMasked(image, grid, keep).front().probs[0];
  };
  EXPECT_DOUBLE_EQ(target(PatchSet::Range(64)), 1.0);
  EXPECT_DOUBLE_EQ(target({7}), 0.5);
  EXPECT_DOUBLE_EQ(target({18, 45}), 0.5);
  EXPECT_EQ(d.Detect(image).front().box, box);
}

TEST(BiasedDetector, MarkerInsideBoxIsRejected) {
  const Image image = SyntheticImage(64, 64, 3, 4);
  EXPECT_THROW(MakeBiasedDetector(image, PatchGrid(64, 64, 8, 8),
                                  std::vector<double>(64, 0.0), 27, 0.5,
                                  {16, 16, 48, 48}, 0, 3),
               std::invalid_argument);
}

TEST(DetectorHandle, ThreadedBatchMatchesSerial) {
  SplitMix64 rng(5);
  std::vector<double> w(64);
  for (double& v : w) v = rng.Uniform() / 32;
  const Image image = SyntheticImage(64, 64, 3, 8);
  const PatchGrid grid(64, 64, 8, 8);
  DetectorHandle d(MakeAdditiveDetector(image, grid, w, {0, 0, 64, 64}, 0, 2));
  ASSERT_TRUE(d.concurrent());
  std::vector<PatchSet> keeps;
  for (int t = 0; t < 40; ++t) {
    std::vector<PatchIndex> k;
    for (PatchIndex i = 0; i < 64; ++i) {
      if (rng.Below(2)) k.push_back(i);
    }
    keeps.emplace_back(k);
  }
  const auto serial = d.DetectMaskedBatch(image, grid, keeps, 1);
  const auto threaded = d.DetectMaskedBatch(image, grid, keeps, 4);
  EXPECT_EQ(serial, threaded);
  EXPECT_EQ(d.evaluations(), 80u);
}

TEST(SetFunctionDetector, KeptPatchesRecoversTheKeepSet) {
  auto scene = testing::MakeStripScene(5, [](const PatchSet&) { return 0.0; });
  auto* raw = static_cast<SetFunctionDetector*>(scene.detector.get());
  const PatchSet keep{0, 3, 4};
  EXPECT_EQ(raw->KeptPatches(MaskApply(scene.image, scene.grid, keep)), keep);
}

}  // namespace
}  // namespace vxcode

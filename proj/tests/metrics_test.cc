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

#include "vxcode/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "test_support.h"
#include "vxcode/random.h"

namespace vxcode {
namespace {

using testing::MakeStripScene;

testing::StripScene AdditiveScene() {
  const std::vector<double> w = {0.5, 0.3, 0.2};
  return MakeStripScene(3, [w](const PatchSet& s) {
    double sum = 0.0;
    for (PatchIndex i : s) sum += w[i];
    return sum;
  });
}

Curve CurveFor(testing::StripScene& scene, std::vector<PatchIndex> order,
               Mode mode) {
  DetectorHandle d(scene.detector);
  return PerturbationCurve(d, scene.image, scene.grid, order, mode,
                           scene.config.reward);
}

TEST(CurveTest, InsertionReplayOfEngineOrder) {
  auto scene = AdditiveScene();
  DetectorHandle d(scene.detector);
  const auto order =
      ExplainRun(d, scene.image, scene.grid, PatchSet::Range(3), scene.config)
          .Order();
  const Curve c = CurveFor(scene, order, Mode::kInsertion);
  ASSERT_EQ(c.size(), 4u);
  const double fractions[] = {0.0, 1.0 / 3, 2.0 / 3, 1.0};
  const double scores[] = {0.0, 0.5, 0.8, 1.0};
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(c[k].fraction, fractions[k]);
    EXPECT_DOUBLE_EQ(c[k].score, scores[k]);
  }
  // Trapezoids: (0 + .5 + .5 + .8 + .8 + 1) / 2 / 3.
  EXPECT_NEAR(Auc(c), 3.6 / 6, 1e-15);
}

TEST(CurveTest, CostsOrderSizePlusOneCalls) {
  auto scene = AdditiveScene();
  DetectorHandle d(scene.detector);
  const std::vector<PatchIndex> order = {2, 0, 1};
  PerturbationCurve(d, scene.image, scene.grid, order, Mode::kDeletion,
                    scene.config.reward);
  EXPECT_EQ(d.evaluations(), 4u);
}

TEST(CurveTest, ReversedImportanceIsTheSlowestDeletion) {
  auto scene = AdditiveScene();
  std::vector<PatchIndex> order = {0, 1, 2};
  double best = -1.0;
  std::vector<PatchIndex> best_order;
  do {
    const double a = Auc(CurveFor(scene, order, Mode::kDeletion));
    if (a > best + 1e-12) {
      best = a;
      best_order = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(best_order, (std::vector<PatchIndex>{2, 1, 0}));
}

TEST(CurveTest, ConstantDetectorGivesFlatCurve) {
  auto scene = MakeStripScene(4, [](const PatchSet&) { return 0.37; });
  for (Mode mode : {Mode::kInsertion, Mode::kDeletion}) {
    for (const CurvePoint& p : CurveFor(scene, {3, 1, 0, 2}, mode)) {
      EXPECT_EQ(p.score, 0.37);
    }
  }
}

TEST(CurveTest, OrderMustBeAPermutation) {
  auto scene = AdditiveScene();
  DetectorHandle d(scene.detector);
  const std::vector<PatchIndex> bad = {0, 0, 1};
  EXPECT_THROW(PerturbationCurve(d, scene.image, scene.grid, bad,
                                 Mode::kInsertion, scene.config.reward),
               std::invalid_argument);
}

TEST(AucTest, ConstantAndRampCurves) {
  EXPECT_DOUBLE_EQ(Auc({{0, 1}, {0.5, 1}, {1, 1}}), 1.0);
  EXPECT_DOUBLE_EQ(Auc({{0, 0}, {0.5, 0}, {1, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(Auc({{0, 0}, {0.25, 0.25}, {0.5, 0.5}, {1, 1}}), 0.5);
  EXPECT_THROW(Auc({{0, 1}}), std::invalid_argument);
  EXPECT_THROW(Auc({{0, 1}, {0, 1}}), std::invalid_argument);
}

TEST(OverallTest, Examples) {
  EXPECT_DOUBLE_EQ(Overall(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Overall(0.37, 0.37), 0.0);
  EXPECT_NEAR(Overall(0.904, 0.053), 0.851, 1e-12);
}

HeatMap Uniform(int w, int h, double v) { return HeatMap(w, h, v); }

TEST(PointingGameTest, Examples) {
  HeatMap map(10, 10, 0.1);
  map.at(5, 5) = 0.9;
  EXPECT_TRUE(PointingGame(map, GroundTruthRegion(BBox{4, 4, 6, 6})));
  HeatMap lone(10, 10, 0.0);
  lone.at(9, 9) = 1.0;
  EXPECT_FALSE(PointingGame(lone, GroundTruthRegion(BBox{0, 0, 5, 5})));
  EXPECT_TRUE(
      PointingGame(Uniform(10, 10, 0.5), GroundTruthRegion(BBox{0, 0, 2, 2})));
  EXPECT_FALSE(
      PointingGame(Uniform(10, 10, 0.5), GroundTruthRegion(BBox{3, 3, 8, 8})));
}

TEST(PointingGameTest, InvariantUnderMonotoneTransforms) {
  SplitMix64 rng(12);
  for (int t = 0; t < 50; ++t) {
    HeatMap map(16, 12);
    for (double& v : map.values()) v = rng.Uniform();
    HeatMap squashed = map;
    for (double& v : squashed.values()) v = std::exp(3 * v) / 7 + 0.25;
    const GroundTruthRegion gt(BBox{rng.Uniform() * 8, rng.Uniform() * 6,
                                    8 + rng.Uniform() * 8,
                                    6 + rng.Uniform() * 6});
    EXPECT_EQ(PointingGame(map, gt), PointingGame(squashed, gt));
  }
}

TEST(EnergyPointingGameTest, Examples) {
  // Pixel centres (x + 0.5) inside [0, 10] x [0, 10] of a 20 x 20 map.
  EXPECT_DOUBLE_EQ(EnergyPointingGame(Uniform(20, 20, 0.3),
                                      GroundTruthRegion(BBox{0, 0, 10, 10})),
                   0.25);
  HeatMap inside(20, 20, 0.0);
  inside.at(3, 4) = 0.5;
  inside.at(6, 1) = 0.2;
  EXPECT_DOUBLE_EQ(
      EnergyPointingGame(inside, GroundTruthRegion(BBox{0, 0, 10, 10})), 1.0);
  EXPECT_EQ(EnergyPointingGame(Uniform(20, 20, 0.0),
                               GroundTruthRegion(BBox{0, 0, 10, 10})),
            0.0);
}

TEST(EnergyPointingGameTest, ProportionalToCoveredArea) {
  for (int side = 1; side <= 16; ++side) {
    const double epg = EnergyPointingGame(
        Uniform(16, 16, 0.7), GroundTruthRegion(BBox{0, 0, 1.0 * side, 16}));
    EXPECT_NEAR(epg, side / 16.0, 1e-12);
  }
}

TEST(EnergyPointingGameTest, MaskRegion) {
  BinaryMask mask{4, 4, std::vector<std::uint8_t>(16, 0)};
  mask.inside[0] = mask.inside[5] = 1;
  const GroundTruthRegion gt(mask);
  EXPECT_DOUBLE_EQ(EnergyPointingGame(Uniform(4, 4, 1.0), gt), 2.0 / 16);
  EXPECT_THROW(EnergyPointingGame(Uniform(5, 4, 1.0), gt),
               std::invalid_argument);
}

TEST(OrderFromHeatMapTest, DescendingWithIndexTies) {
  HeatMap map(16, 4, 0.0);
  const PatchGrid g(16, 4, 1, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 16; ++x) {
      map.at(x, y) = (std::vector<double>{0.2, 0.9, 0.2, 0.5})[x / 4];
    }
  }
  EXPECT_EQ(OrderFromHeatMap(map, g), (std::vector<PatchIndex>{1, 3, 0, 2}));
}

}  // namespace
}  // namespace vxcode

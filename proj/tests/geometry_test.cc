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

#include "vxcode/geometry.h"

#include <gtest/gtest.h>

#include <vector>

#include "vxcode/random.h"

namespace vxcode {
namespace {

TEST(IouTest, IdenticalBoxes) {
  EXPECT_DOUBLE_EQ(Iou({0, 0, 4, 4}, {0, 0, 4, 4}), 1.0);
}

TEST(IouTest, DisjointBoxes) {
  EXPECT_DOUBLE_EQ(Iou({0, 0, 1, 1}, {2, 2, 3, 3}), 0.0);
}

TEST(IouTest, PartialOverlapIsOneSeventh) {
  // Intersection 1, union 4 + 4 - 1 = 7.
  EXPECT_DOUBLE_EQ(Iou({0, 0, 2, 2}, {1, 1, 3, 3}), 1.0 / 7.0);
}

TEST(IouTest, DegenerateBoxesGiveZero) {
  EXPECT_DOUBLE_EQ(Iou({1, 1, 1, 1}, {1, 1, 1, 1}), 0.0);
}

TEST(IouTest, SymmetricAndBoundedOnRandomBoxes) {
  SplitMix64 rng(42);
  auto box = [&] {
    double x1 = rng.Uniform() * 50, y1 = rng.Uniform() * 50;
    return BBox{x1, y1, x1 + rng.Uniform() * 50, y1 + rng.Uniform() * 50};
  };
  for (int t = 0; t < 2000; ++t) {
    const BBox a = box(), b = box();
    const double ab = Iou(a, b);
    EXPECT_EQ(ab, Iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(GridSizingTest, AreaRatioThresholds) {
  EXPECT_EQ(DivisionsForAreaRatio(0.15), 16);
  EXPECT_EQ(DivisionsForAreaRatio(0.005), 24);
  EXPECT_EQ(DivisionsForAreaRatio(0.5), 8);
  EXPECT_EQ(DivisionsForAreaRatio(0.01), 24);
  EXPECT_EQ(DivisionsForAreaRatio(0.2), 16);
  EXPECT_EQ(DivisionsForAreaRatio(0.0), 24);
}

TEST(GridSizingTest, MakeGridFor640x480) {
  // 0.15 * 640 * 480 = 46080 = 240 * 192.
  const PatchGrid g = MakeGrid(640, 480, {0, 0, 240, 192});
  EXPECT_EQ(g.rows(), 16);
  EXPECT_EQ(g.cols(), 16);
  EXPECT_EQ(g.size(), 256u);
}

TEST(PatchGridTest, RectExactDivision) {
  const PatchGrid g(160, 160, 16, 16);
  EXPECT_EQ(g.Rect(0), (PixelRect{0, 0, 10, 10}));
  EXPECT_EQ(g.Rect(255), (PixelRect{150, 150, 160, 160}));
}

TEST(PatchGridTest, LastColumnAbsorbsRemainder) {
  const PatchGrid g(161, 160, 16, 16);
  EXPECT_EQ(g.Rect(15).Width(), 11);
  EXPECT_EQ(g.Rect(15).x1, 161);
  EXPECT_EQ(g.Rect(14).Width(), 10);
}

TEST(PatchGridTest, OutOfRangeIndexThrows) {
  const PatchGrid g(160, 160, 16, 16);
  EXPECT_THROW(g.Rect(256), std::out_of_range);
}

TEST(PatchGridTest, InvalidSizesThrow) {
  EXPECT_THROW(PatchGrid(0, 10, 1, 1), std::invalid_argument);
  EXPECT_THROW(PatchGrid(10, 10, 0, 1), std::invalid_argument);
  EXPECT_THROW(PatchGrid(3, 10, 1, 4), std::invalid_argument);
}

TEST(PatchGridTest, RectsPartitionTheImage) {
  SplitMix64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const int w = 1 + static_cast<int>(rng.Below(90));
    const int h = 1 + static_cast<int>(rng.Below(90));
    const int rows = 1 + static_cast<int>(rng.Below(h));
    const int cols = 1 + static_cast<int>(rng.Below(w));
    const PatchGrid g(w, h, rows, cols);
    std::vector<int> hits(static_cast<std::size_t>(w) * h, 0);
    for (PatchIndex i = 0; i < g.size(); ++i) {
      const PixelRect r = g.Rect(i);
      for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) {
          ++hits[static_cast<std::size_t>(y) * w + x];
          EXPECT_EQ(g.PatchAt(x, y), i);
        }
      }
    }
    for (int v : hits) ASSERT_EQ(v, 1);
  }
}

TEST(CandidateTest, LargeBoxKeepsEveryPatch) {
  const PatchGrid g(100, 100, 8, 8);
  EXPECT_EQ(CandidatePatches(g, {0, 0, 71, 71}), PatchSet::Range(64));
  EXPECT_EQ(CandidatePatches(g, {0, 0, 100, 100}), PatchSet::Range(64));
}

TEST(CandidateTest, SmallBoxKeepsCentresWithinMargins) {
  const PatchGrid g(100, 100, 8, 8);
  const BBox box{40, 40, 50, 50};  // ratio 0.01
  // Independent enumeration: 100 / 8 leaves widths 12 x 7 and 16, so the
  // centres are 6, 18, 30, 42, 54, 66, 78, 92. Margins are 100 / 5 = 20.
  const double centres[] = {6, 18, 30, 42, 54, 66, 78, 92};
  std::vector<PatchIndex> expected;
  for (int row = 0; row < 8; ++row) {
    for (int col = 0; col < 8; ++col) {
      if (centres[row] >= 20 && centres[row] <= 70 && centres[col] >= 20 &&
          centres[col] <= 70) {
        expected.push_back(static_cast<PatchIndex>(row * 8 + col));
      }
    }
  }
  ASSERT_EQ(expected.size(), 16u);
  EXPECT_EQ(CandidatePatches(g, box), PatchSet(expected));
}

TEST(PatchSetTest, SortsAndDeduplicates) {
  const PatchSet s{5, 1, 5, 3};
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], 1u);
  EXPECT_EQ(s[2], 5u);
  EXPECT_TRUE(s.Contains(3));
  EXPECT_FALSE(s.Contains(2));
}

TEST(PatchSetTest, SetAlgebra) {
  const PatchSet a{1, 2, 3};
  const PatchSet b{3, 4};
  EXPECT_EQ(a.Union(b), (PatchSet{1, 2, 3, 4}));
  EXPECT_EQ(a.Difference(b), (PatchSet{1, 2}));
  EXPECT_EQ(a.With(0), (PatchSet{0, 1, 2, 3}));
  EXPECT_TRUE((PatchSet{2, 3}).IsSubsetOf(a));
  EXPECT_FALSE(b.IsSubsetOf(a));
}

}  // namespace
}  // namespace vxcode

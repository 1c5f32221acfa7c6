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

//
// Faithfulness (insertion / deletion AUC) and localization (pointing game)
// metrics.
//

#ifndef VXCODE_METRICS_H_
#define VXCODE_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vxcode/detector.h"
#include "vxcode/greedy_engine.h"
#include "vxcode/heatmap.h"
#include "vxcode/reward.h"

namespace vxcode {

struct CurvePoint {
  double fraction;  // perturbed patches / total patches
  double score;
};

using Curve = std::vector<CurvePoint>;

// Scores the image while patches are inserted into an empty image
// (insertion) or removed from the original (deletion) one at a time in
// `order`, which must be a permutation of all grid patches. The first point
// is the unperturbed baseline at fraction 0. Costs order.size() + 1 detector
// calls.
Curve PerturbationCurve(DetectorHandle& detector, const Image& image,
                        const PatchGrid& grid,
                        std::span<const PatchIndex> order, Mode mode,
                        const RewardSpec& similarity);

// Trapezoidal area over fraction. Throws std::invalid_argument for fewer than
// two points or non-increasing fractions.
double Auc(const Curve& curve);

// Insertion AUC minus deletion AUC.
inline double Overall(double insertion_auc, double deletion_auc) {
  return insertion_auc - deletion_auc;
}

// Patches by descending importance (top-left pixel of each patch), ties by
// ascending index.
std::vector<PatchIndex> OrderFromHeatMap(const HeatMap& map,
                                         const PatchGrid& grid);

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> inside;  // row-major, nonzero = inside

  bool Contains(int x, int y) const {
    return inside[static_cast<std::size_t>(y) * width + x] != 0;
  }
};

// Ground truth as a box (pixel (x, y) is inside when its centre lies in the
// closed box) or as a mask raster.
class GroundTruthRegion {
 public:
  explicit GroundTruthRegion(BBox box) : region_(box) {}
  explicit GroundTruthRegion(BinaryMask mask) : region_(std::move(mask)) {}

  bool Contains(int x, int y) const;
  // Throws std::invalid_argument when a mask does not match the map size.
  void CheckSize(int width, int height) const;

 private:
  std::variant<BBox, BinaryMask> region_;
};

// Hit when the global maximum (first in row-major order among ties) lies in
// the ground truth.
bool PointingGame(const HeatMap& map, const GroundTruthRegion& gt);

// Fraction of total importance inside the ground truth; 0 for an all-zero
// map.
double EnergyPointingGame(const HeatMap& map, const GroundTruthRegion& gt);

// "fraction,score" lines with a header.
void WriteCurveCsv(const Curve& curve, const std::string& path);

}  // namespace vxcode

#endif  // VXCODE_METRICS_H_

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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace vxcode {
namespace {

// Compensated summation; keeps large rasters of equal values exact.
class NeumaierSum {
 public:
  void Add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

Curve PerturbationCurve(DetectorHandle& detector, const Image& image,
                        const PatchGrid& grid,
                        std::span<const PatchIndex> order, Mode mode,
                        const RewardSpec& similarity) {
  const std::size_t n = grid.size();
  if (order.size() != n ||
      PatchSet(std::vector<PatchIndex>(order.begin(), order.end())) !=
          PatchSet::Range(n)) {
    throw std::invalid_argument(
        "curve: order is not a permutation of the grid");
  }
  const PatchSet universe = PatchSet::Range(n);
  std::vector<PatchSet> keeps;
  keeps.reserve(n + 1);
  PatchSet perturbed;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k) perturbed = perturbed.With(order[k - 1]);
    keeps.push_back(mode == Mode::kInsertion ? perturbed
                                             : universe.Difference(perturbed));
  }
  const auto outputs = detector.DetectMaskedBatch(image, grid, keeps);
  Curve curve;
  curve.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    curve.push_back({static_cast<double>(k) / static_cast<double>(n),
                     EvaluateReward(similarity, outputs[k])});
  }
  return curve;
}

double Auc(const Curve& curve) {
  if (curve.size() < 2) {
    throw std::invalid_argument("auc: need at least two points");
  }
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double dx = curve[i].fraction - curve[i - 1].fraction;
    if (!(dx > 0.0)) {
      throw std::invalid_argument("auc: fractions must strictly increase");
    }
    area += 0.5 * dx * (curve[i].score + curve[i - 1].score);
  }
  return area;
}

std::vector<PatchIndex> OrderFromHeatMap(const HeatMap& map,
                                         const PatchGrid& grid) {
  const std::vector<double> importance = PatchImportance(map, grid);
  std::vector<PatchIndex> order(grid.size());
  std::iota(order.begin(), order.end(), PatchIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](PatchIndex a, PatchIndex b) {
    return importance[a] > importance[b];
  });
  return order;
}

bool GroundTruthRegion::Contains(int x, int y) const {
  if (const auto* box = std::get_if<BBox>(&region_)) {
    const double cx = x + 0.5;
    const double cy = y + 0.5;
    return cx >= box->x1 && cx <= box->x2 && cy >= box->y1 && cy <= box->y2;
  }
  return std::get<BinaryMask>(region_).Contains(x, y);
}

void GroundTruthRegion::CheckSize(int width, int height) const {
  if (const auto* mask = std::get_if<BinaryMask>(&region_)) {
    if (mask->width != width || mask->height != height ||
        mask->inside.size() != static_cast<std::size_t>(width) * height) {
      throw std::invalid_argument("ground truth mask does not match heat map");
    }
  }
}

bool PointingGame(const HeatMap& map, const GroundTruthRegion& gt) {
  gt.CheckSize(map.width(), map.height());
  const auto& v = map.values();
  const auto best = static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
  const int x = static_cast<int>(best % static_cast<std::size_t>(map.width()));
  const int y = static_cast<int>(best / static_cast<std::size_t>(map.width()));
  return gt.Contains(x, y);
}

double EnergyPointingGame(const HeatMap& map, const GroundTruthRegion& gt) {
  gt.CheckSize(map.width(), map.height());
  NeumaierSum inside;
  NeumaierSum total;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      total.Add(map.at(x, y));
      if (gt.Contains(x, y)) inside.Add(map.at(x, y));
    }
  }
  if (total.Value() == 0.0) return 0.0;
  return inside.Value() / total.Value();
}

void WriteCurveCsv(const Curve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "fraction,score\n";
  for (const CurvePoint& p : curve) {
    out << fmt::format("{},{}\n", p.fraction, p.score);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace vxcode

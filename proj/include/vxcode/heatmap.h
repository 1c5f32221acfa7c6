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

#ifndef VXCODE_HEATMAP_H_
#define VXCODE_HEATMAP_H_

#include <string>
#include <vector>

#include "vxcode/greedy_engine.h"

namespace vxcode {

// Row-major per-pixel importance raster.
class HeatMap {
 public:
  HeatMap(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double& at(int x, int y) {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  double at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  friend bool operator==(const HeatMap&, const HeatMap&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

// Block-constant importance from a complete trace. Patches of the first step
// get 1.0; patches of step k >= 2 get 1 - f_{k-1} (insertion) or f_{k-1}
// (deletion), where f_{k-1} is the reward after the previous step. Every
// member of a multi-patch step shares its step value, and appended
// non-candidate patches get 0. Throws std::invalid_argument on an incomplete
// trace.
HeatMap BuildHeatMap(const ExplanationTrace& trace);

// Per-patch importance read at each patch's top-left pixel.
std::vector<double> PatchImportance(const HeatMap& map, const PatchGrid& grid);

// Writes a binary 16-bit PGM (P5, maxval 65535, big-endian samples, values
// round(v * 65535) after clamping to [0, 1]) and a CSV twin holding the raw
// values, one image row per line.
void ExportRaster(const HeatMap& map, const std::string& pgm_path,
                  const std::string& csv_path);

HeatMap ReadPgm16(const std::string& path);
HeatMap ReadHeatMapCsv(const std::string& path);

}  // namespace vxcode

#endif  // VXCODE_HEATMAP_H_

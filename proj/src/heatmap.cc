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

#include "vxcode/heatmap.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vxcode {

HeatMap::HeatMap(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("heat map: dimensions must be positive");
  }
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

namespace {

void FillRect(HeatMap& map, const PixelRect& r, double value) {
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) map.at(x, y) = value;
  }
}

}  // namespace

HeatMap BuildHeatMap(const ExplanationTrace& trace) {
  if (!trace.complete) {
    throw std::invalid_argument("heat map: trace is incomplete");
  }
  ValidateTrace(trace);
  const PatchGrid& grid = trace.grid;
  HeatMap map(grid.image_width(), grid.image_height());
  const bool insertion = trace.mode == Mode::kInsertion;
  double previous = 0.0;
  bool first = true;
  for (const TraceStep& step : trace.steps) {
    double s = 0.0;
    if (!step.appended) {
      if (first) {
        s = 1.0;
        first = false;
      } else {
        s = insertion ? 1.0 - previous : previous;
      }
      previous = *step.reward_after;
    }
    for (PatchIndex i : step.selected) FillRect(map, grid.Rect(i), s);
  }
  return map;
}

std::vector<double> PatchImportance(const HeatMap& map, const PatchGrid& grid) {
  if (map.width() != grid.image_width() ||
      map.height() != grid.image_height()) {
    throw std::invalid_argument("patch importance: grid/map size mismatch");
  }
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const PixelRect r = grid.Rect(static_cast<PatchIndex>(i));
    out[i] = map.at(r.x0, r.y0);
  }
  return out;
}

void ExportRaster(const HeatMap& map, const std::string& pgm_path,
                  const std::string& csv_path) {
  {
    std::ofstream out(pgm_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + pgm_path);
    out << "P5\n" << map.width() << " " << map.height() << "\n65535\n";
    std::string bytes;
    bytes.reserve(map.values().size() * 2);
    for (double v : map.values()) {
      const auto q = static_cast<std::uint16_t>(
          std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
      bytes.push_back(static_cast<char>(q >> 8));
      bytes.push_back(static_cast<char>(q & 0xff));
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + pgm_path);
  }
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (x) csv << ',';
      csv << fmt::format("{}", map.at(x, y));
    }
    csv << '\n';
  }
  if (!csv) throw std::runtime_error("write failed: " + csv_path);
}

HeatMap ReadPgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 65535 || w <= 0 || h <= 0) {
    throw std::runtime_error("not a 16-bit P5 graymap: " + path);
  }
  in.get();  // single whitespace after the header
  HeatMap map(w, h);
  std::string bytes(static_cast<std::size_t>(w) * h * 2, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw std::runtime_error("truncated graymap: " + path);
  for (std::size_t i = 0; i < map.values().size(); ++i) {
    const auto hi = static_cast<std::uint8_t>(bytes[2 * i]);
    const auto lo = static_cast<std::uint8_t>(bytes[2 * i + 1]);
    map.values()[i] = ((hi << 8) | lo) / 65535.0;
  }
  return map;
}

HeatMap ReadHeatMapCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged heat map csv: " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) {
    throw std::runtime_error("empty heat map csv: " + path);
  }
  HeatMap map(static_cast<int>(rows.front().size()),
              static_cast<int>(rows.size()));
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      map.at(x, y) =
          rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
    }
  }
  return map;
}

}  // namespace vxcode

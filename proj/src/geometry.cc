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

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>

namespace vxcode {

double BBox::Area() const {
  return std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
}

double Iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (ix > 0.0 && iy > 0.0) ? ix * iy : 0.0;
  const double uni = a.Area() + b.Area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

PatchGrid::PatchGrid(int image_w, int image_h, int rows, int cols)
    : image_w_(image_w), image_h_(image_h), rows_(rows), cols_(cols) {
  if (image_w <= 0 || image_h <= 0) {
    throw std::invalid_argument("patch grid: image must have positive size");
  }
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("patch grid: division counts must be >= 1");
  }
  if (rows > image_h || cols > image_w) {
    throw std::invalid_argument(
        "patch grid: more divisions than pixels (" + std::to_string(cols) +
        "x" + std::to_string(rows) + " on " + std::to_string(image_w) + "x" +
        std::to_string(image_h) + ")");
  }
}

PixelRect PatchGrid::Rect(PatchIndex i) const {
  if (i >= size()) {
    throw std::out_of_range("patch index " + std::to_string(i) +
                            " out of range for grid of " +
                            std::to_string(size()));
  }
  const int row = static_cast<int>(i) / cols_;
  const int col = static_cast<int>(i) % cols_;
  const int pw = image_w_ / cols_;
  const int ph = image_h_ / rows_;
  PixelRect r;
  r.x0 = col * pw;
  r.y0 = row * ph;
  r.x1 = (col == cols_ - 1) ? image_w_ : r.x0 + pw;
  r.y1 = (row == rows_ - 1) ? image_h_ : r.y0 + ph;
  return r;
}

PatchIndex PatchGrid::PatchAt(int x, int y) const {
  const int pw = image_w_ / cols_;
  const int ph = image_h_ / rows_;
  const int col = std::min(x / pw, cols_ - 1);
  const int row = std::min(y / ph, rows_ - 1);
  return static_cast<PatchIndex>(row * cols_ + col);
}

PatchSet::PatchSet(std::initializer_list<PatchIndex> indices)
    : PatchSet(std::vector<PatchIndex>(indices)) {}

PatchSet::PatchSet(std::vector<PatchIndex> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

PatchSet PatchSet::Range(std::size_t n) {
  PatchSet s;
  s.indices_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.indices_[i] = static_cast<PatchIndex>(i);
  }
  return s;
}

bool PatchSet::Contains(PatchIndex i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

bool PatchSet::IsSubsetOf(const PatchSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

PatchSet PatchSet::Union(const PatchSet& other) const {
  PatchSet out;
  out.indices_.reserve(indices_.size() + other.indices_.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(out.indices_));
  return out;
}

PatchSet PatchSet::Difference(const PatchSet& other) const {
  PatchSet out;
  out.indices_.reserve(indices_.size());
  std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(),
                      other.indices_.end(), std::back_inserter(out.indices_));
  return out;
}

PatchSet PatchSet::With(PatchIndex i) const {
  PatchSet out;
  out.indices_.reserve(indices_.size() + 1);
  auto pos = std::lower_bound(indices_.begin(), indices_.end(), i);
  out.indices_.assign(indices_.begin(), pos);
  out.indices_.push_back(i);
  if (pos != indices_.end() && *pos == i) ++pos;
  out.indices_.insert(out.indices_.end(), pos, indices_.end());
  return out;
}

double BoxAreaRatio(int image_w, int image_h, const BBox& box) {
  return box.Area() /
         (static_cast<double>(image_w) * static_cast<double>(image_h));
}

int DivisionsForAreaRatio(double area_ratio) {
  if (area_ratio <= 0.01) return 24;
  if (area_ratio <= 0.2) return 16;
  return 8;
}

PatchGrid MakeGrid(int image_w, int image_h, const BBox& target_box) {
  if (image_w <= 0 || image_h <= 0) {
    throw std::invalid_argument("make grid: zero-area image");
  }
  const int d =
      DivisionsForAreaRatio(BoxAreaRatio(image_w, image_h, target_box));
  return PatchGrid(image_w, image_h, d, d);
}

PatchSet CandidatePatches(const PatchGrid& grid, const BBox& target_box) {
  const int w = grid.image_width();
  const int h = grid.image_height();
  if (BoxAreaRatio(w, h, target_box) > 0.1) return PatchSet::Range(grid.size());

  const double mx = w / 5.0;
  const double my = h / 5.0;
  std::vector<PatchIndex> keep;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const PixelRect r = grid.Rect(static_cast<PatchIndex>(i));
    const double cx = 0.5 * (r.x0 + r.x1);
    const double cy = 0.5 * (r.y0 + r.y1);
    if (cx >= target_box.x1 - mx && cx <= target_box.x2 + mx &&
        cy >= target_box.y1 - my && cy <= target_box.y2 + my) {
      keep.push_back(static_cast<PatchIndex>(i));
    }
  }
  return PatchSet(std::move(keep));
}

}  // namespace vxcode

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
// Boxes, patch grids and patch sets.
//

#ifndef VXCODE_GEOMETRY_H_
#define VXCODE_GEOMETRY_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace vxcode {

// Axis-aligned box in continuous pixel coordinates.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double Width() const { return x2 - x1; }
  double Height() const { return y2 - y1; }
  double Area() const;
  bool Valid() const { return x1 <= x2 && y1 <= y2; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Intersection over union on closed-interval area arithmetic. Zero when the
// union has zero area.
double Iou(const BBox& a, const BBox& b);

// Half-open integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int Width() const { return x1 - x0; }
  int Height() const { return y1 - y0; }
  bool Contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

using PatchIndex = std::uint32_t;

// Tiling of an image into rows x cols patches, indexed row-major from the
// top-left. When a dimension is not divisible by its division count the last
// row/column absorbs the remainder.
class PatchGrid {
 public:
  PatchGrid(int image_w, int image_h, int rows, int cols);

  int image_width() const { return image_w_; }
  int image_height() const { return image_h_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const {
    return static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_);
  }

  // Throws std::out_of_range for i >= size().
  PixelRect Rect(PatchIndex i) const;

  // Patch containing pixel (x, y).
  PatchIndex PatchAt(int x, int y) const;

  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;

 private:
  int image_w_;
  int image_h_;
  int rows_;
  int cols_;
};

// Subset of patch indices kept in canonical ascending order without
// duplicates.
class PatchSet {
 public:
  PatchSet() = default;
  PatchSet(std::initializer_list<PatchIndex> indices);
  explicit PatchSet(std::vector<PatchIndex> indices);

  // {0, ..., n-1}.
  static PatchSet Range(std::size_t n);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool Contains(PatchIndex i) const;
  bool IsSubsetOf(const PatchSet& other) const;

  PatchSet Union(const PatchSet& other) const;
  PatchSet Difference(const PatchSet& other) const;
  PatchSet With(PatchIndex i) const;

  std::span<const PatchIndex> indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  PatchIndex operator[](std::size_t k) const { return indices_[k]; }

  friend bool operator==(const PatchSet&, const PatchSet&) = default;

 private:
  std::vector<PatchIndex> indices_;
};

// Ratio of the box area to the image area.
double BoxAreaRatio(int image_w, int image_h, const BBox& box);

// Equal division count for both axes from the box/image area ratio:
// 24 for (0, 0.01], 16 for (0.01, 0.2], 8 above. A zero ratio maps to 24.
int DivisionsForAreaRatio(double area_ratio);

// Grid sized from the target box. Throws std::invalid_argument for a
// non-positive image size.
PatchGrid MakeGrid(int image_w, int image_h, const BBox& target_box);

// Patches worth scoring for the target. For area ratios above 0.1 this is the
// whole grid; otherwise only patches whose centre lies within a margin of one
// fifth of the image size around the box.
PatchSet CandidatePatches(const PatchGrid& grid, const BBox& target_box);

}  // namespace vxcode

#endif  // VXCODE_GEOMETRY_H_

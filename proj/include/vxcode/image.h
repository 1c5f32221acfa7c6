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

#ifndef VXCODE_IMAGE_H_
#define VXCODE_IMAGE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "vxcode/geometry.h"

namespace vxcode {

// Interleaved float raster with intensities in [0, 1].
class Image {
 public:
  Image() = default;
  // Zero-filled image. Throws std::invalid_argument on non-positive sizes.
  Image(int width, int height, int channels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  float& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  // True when every pixel of `rect` equals the corresponding pixel of `other`.
  bool RegionEquals(const Image& other, const PixelRect& rect) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Copy of `image` where every pixel outside the kept patches is exactly 0.
// Throws std::invalid_argument when the grid does not match the image size.
Image MaskApply(const Image& image, const PatchGrid& grid,
                const PatchSet& keep);

// 8-bit PNG I/O. Pixel values are quantized to k/255 on write.
Image ReadPng(const std::string& path);
void WritePng(const Image& image, const std::string& path);
std::vector<std::uint8_t> EncodePng(const Image& image);

}  // namespace vxcode

#endif  // VXCODE_IMAGE_H_

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

#include "vxcode/image.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace vxcode {

Image::Image(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw std::invalid_argument("image: dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
}

bool Image::RegionEquals(const Image& other, const PixelRect& rect) const {
  const std::size_t row_len =
      static_cast<std::size_t>(rect.Width()) * channels_;
  for (int y = rect.y0; y < rect.y1; ++y) {
    const std::size_t off =
        (static_cast<std::size_t>(y) * width_ + rect.x0) * channels_;
    if (!std::equal(data_.begin() + off, data_.begin() + off + row_len,
                    other.data_.begin() + off)) {
      return false;
    }
  }
  return true;
}

Image MaskApply(const Image& image, const PatchGrid& grid,
                const PatchSet& keep) {
  if (grid.image_width() != image.width() ||
      grid.image_height() != image.height()) {
    throw std::invalid_argument("mask: grid does not match image size");
  }
  Image out(image.width(), image.height(), image.channels());
  const int ch = image.channels();
  for (PatchIndex i : keep) {
    const PixelRect r = grid.Rect(i);
    for (int y = r.y0; y < r.y1; ++y) {
      const std::size_t off =
          (static_cast<std::size_t>(y) * image.width() + r.x0) * ch;
      std::copy_n(image.data().begin() + off,
                  static_cast<std::size_t>(r.Width()) * ch,
                  out.data().begin() + off);
    }
  }
  return out;
}

namespace {

struct PngReadDeleter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadDeleter() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriteDeleter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteDeleter() { png_destroy_write_struct(&png, &info); }
};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

std::uint8_t Quantize(float v) {
  return static_cast<std::uint8_t>(
      std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

int ColorType(int channels) {
  switch (channels) {
    case 1:
      return PNG_COLOR_TYPE_GRAY;
    case 2:
      return PNG_COLOR_TYPE_GRAY_ALPHA;
    case 3:
      return PNG_COLOR_TYPE_RGB;
    case 4:
      return PNG_COLOR_TYPE_RGBA;
  }
  throw std::invalid_argument("png: unsupported channel count");
}

void PngWriteToVector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void PngFlushNoop(png_structp) {}

void WritePngRows(png_structp png, png_infop info, const Image& image) {
  png_set_IHDR(png, info, image.width(), image.height(), 8,
               ColorType(image.channels()), PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(image.width()) *
                                image.channels());
  const std::size_t stride = row.size();
  for (int y = 0; y < image.height(); ++y) {
    for (std::size_t k = 0; k < stride; ++k) {
      row[k] = Quantize(image.data()[y * stride + k]);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
}

}  // namespace

Image ReadPng(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open image: " + path);

  PngReadDeleter guard;
  guard.png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!guard.png) throw std::runtime_error("png: out of memory");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw std::runtime_error("png: out of memory");
  if (setjmp(png_jmpbuf(guard.png))) {
    throw std::runtime_error("png: failed to decode " + path);
  }
  png_init_io(guard.png, fp.get());
  png_read_info(guard.png, guard.info);

  png_set_strip_16(guard.png);
  png_set_packing(guard.png);
  png_set_palette_to_rgb(guard.png);
  png_set_expand_gray_1_2_4_to_8(guard.png);
  png_set_tRNS_to_alpha(guard.png);
  png_read_update_info(guard.png, guard.info);

  const int w = static_cast<int>(png_get_image_width(guard.png, guard.info));
  const int h = static_cast<int>(png_get_image_height(guard.png, guard.info));
  const int ch = png_get_channels(guard.png, guard.info);
  Image image(w, h, ch);
  std::vector<std::uint8_t> row(png_get_rowbytes(guard.png, guard.info));
  for (int y = 0; y < h; ++y) {
    png_read_row(guard.png, row.data(), nullptr);
    for (std::size_t k = 0; k < static_cast<std::size_t>(w) * ch; ++k) {
      image.data()[static_cast<std::size_t>(y) * w * ch + k] = row[k] / 255.0f;
    }
  }
  return image;
}

void WritePng(const Image& image, const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write image: " + path);
  PngWriteDeleter guard;
  guard.png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!guard.png) throw std::runtime_error("png: out of memory");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw std::runtime_error("png: out of memory");
  if (setjmp(png_jmpbuf(guard.png))) {
    throw std::runtime_error("png: failed to encode " + path);
  }
  png_init_io(guard.png, fp.get());
  WritePngRows(guard.png, guard.info, image);
}

std::vector<std::uint8_t> EncodePng(const Image& image) {
  std::vector<std::uint8_t> out;
  PngWriteDeleter guard;
  guard.png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!guard.png) throw std::runtime_error("png: out of memory");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw std::runtime_error("png: out of memory");
  if (setjmp(png_jmpbuf(guard.png))) {
    throw std::runtime_error("png: failed to encode image");
  }
  png_set_write_fn(guard.png, &out, PngWriteToVector, PngFlushNoop);
  WritePngRows(guard.png, guard.info, image);
  return out;
}

}  // namespace vxcode

// Copyright 2026 The datlime Authors.
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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "datlime/imaging.hpp"

namespace datlime {

/// 8-bit RGB raster, row-major, interleaved.
class RgbImage {
 public:
  using Pixel = std::array<std::uint8_t, 3>;

  RgbImage() = default;
  RgbImage(std::size_t width, std::size_t height) : width_(width), height_(height), data_(width * height) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  Pixel& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const Pixel& at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  const std::vector<Pixel>& data() const { return data_; }

 private:
  std::size_t width_ = 0, height_ = 0;
  std::vector<Pixel> data_;
};

/// Quantizes clamp(v, 0, 1) * 255 with round-half-up.
std::uint8_t quantize_unit(float v);

/// 8-bit grayscale export; quantization happens only here.
void write_png(const std::filesystem::path& path, const Image& image);
void write_png(const std::filesystem::path& path, const RgbImage& image);

}  // namespace datlime

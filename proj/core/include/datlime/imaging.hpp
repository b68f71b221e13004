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
#include <span>
#include <vector>

namespace datlime {

/// Default grid of a spatially normalized DaTscan volume.
inline constexpr std::size_t kVolumeNx = 91;
inline constexpr std::size_t kVolumeNy = 109;
inline constexpr std::size_t kVolumeNz = 91;

/// Axial slice showing the striatum most prominently (0-based).
inline constexpr std::size_t kDefaultSliceIndex = 41;
inline constexpr double kDefaultCropThreshold = 0.02;
inline constexpr std::size_t kVggInputSize = 224;

/// 3D voxel grid, x fastest, then y, then z.
class Volume {
 public:
  Volume() = default;
  Volume(std::size_t nx, std::size_t ny, std::size_t nz, float fill = 0.0f);
  Volume(std::size_t nx, std::size_t ny, std::size_t nz, std::vector<float> voxels);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return voxels_.size(); }

  float& at(std::size_t x, std::size_t y, std::size_t z) { return voxels_[index(x, y, z)]; }
  float at(std::size_t x, std::size_t y, std::size_t z) const { return voxels_[index(x, y, z)]; }

  std::span<const float> voxels() const { return voxels_; }
  std::span<float> voxels() { return voxels_; }

  bool operator==(const Volume&) const = default;

 private:
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
    return (z * ny_ + y) * nx_ + x;
  }

  std::size_t nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<float> voxels_;
};

/// 2D grayscale image, row-major.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, float fill = 0.0f);
  Image(std::size_t width, std::size_t height, std::vector<float> pixels);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  float& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  float at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }

  std::span<const float> pixels() const { return pixels_; }
  std::span<float> pixels() { return pixels_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t width_ = 0, height_ = 0;
  std::vector<float> pixels_;
};

/// Half-open pixel rectangle [x0, x0+width) x [y0, y0+height).
struct Rect {
  std::size_t x0 = 0, y0 = 0, width = 0, height = 0;
  bool operator==(const Rect&) const = default;
};

struct AugmentSpec {
  double max_shift_frac = 0.1;
  double hflip_prob = 0.5;
  double brightness_low = 0.8;
  double brightness_high = 1.2;
  std::uint64_t rng_seed = 0;

  /// Spec that leaves every image untouched.
  static AugmentSpec identity() { return {0.0, 0.0, 1.0, 1.0, 0}; }

  /// Throws RangeError when a field is out of its domain.
  void validate() const;
};

// Raw volume file: "SVOL" + u32 nx, ny, nz (little-endian) + float32 payload.
void write_volume(const std::filesystem::path& path, const Volume& volume);
Volume read_volume(const std::filesystem::path& path);

/// Byte-level codec behind write_volume/read_volume.
std::vector<std::uint8_t> encode_volume(const Volume& volume);
Volume decode_volume(std::span<const std::uint8_t> bytes);

/// Image stored as a single-slice volume (nx=width, ny=height, nz=1).
void write_image(const std::filesystem::path& path, const Image& image);
Image read_image(const std::filesystem::path& path);

/// Axial plane at z_index: width = nx, height = ny.
Image extract_slice(const Volume& volume, std::size_t z_index = kDefaultSliceIndex);

/// Bounding box of the largest 4-connected component at or above
/// threshold_frac * max. Returns the full frame when nothing qualifies.
Rect find_crop_box(const Image& image, double threshold_frac = kDefaultCropThreshold);
Image crop(const Image& image, const Rect& box);
Image contour_crop(const Image& image, double threshold_frac = kDefaultCropThreshold);

/// Corner-aligned bilinear resampling.
Image resize_bilinear(const Image& image, std::size_t out_w = kVggInputSize,
                      std::size_t out_h = kVggInputSize);

/// Min-max scale into [0, 1]; a constant image maps to zeros.
Image normalize_intensity(const Image& image);

/// Shift (zero fill), optional horizontal flip, then brightness scaling
/// clamped to [0, 1]. Deterministic in (spec.rng_seed, draw_index).
Image augment(const Image& image, const AugmentSpec& spec, std::uint64_t draw_index);

/// Mirror across the vertical axis (columns reversed).
Image flip_horizontal(const Image& image);

/// Integer translation with zero fill; positive dx moves content right.
Image shift(const Image& image, long dx, long dy);

struct PreprocessConfig {
  std::size_t slice_index = kDefaultSliceIndex;
  double crop_threshold = kDefaultCropThreshold;
  std::size_t output_size = 64;
};

struct PreprocessedSlice {
  Image image;
  Rect crop_box;
};

/// Slice, crop, resize and normalize one volume.
PreprocessedSlice preprocess_volume(const Volume& volume, const PreprocessConfig& config);

/// Carries a binary mask through the same slice/crop/resize geometry as
/// its volume. Output pixels are 1 where the resampled mask is >= 0.5.
Image preprocess_mask(const Volume& mask, const Rect& crop_box, const PreprocessConfig& config);

}  // namespace datlime

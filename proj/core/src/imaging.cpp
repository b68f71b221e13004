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

#include "datlime/imaging.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "datlime/error.hpp"
#include "datlime/rng.hpp"

namespace datlime {

namespace {

constexpr std::array<char, 4> kVolumeMagic = {'S', 'V', 'O', 'L'};
constexpr std::size_t kVolumeHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

void require_finite(std::span<const float> values, const char* what) {
  for (float v : values) {
    if (!std::isfinite(v)) throw FormatError(std::string(what) + ": non-finite value");
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Volume::Volume(std::size_t nx, std::size_t ny, std::size_t nz, float fill)
    : nx_(nx), ny_(ny), nz_(nz), voxels_(nx * ny * nz, fill) {}

Volume::Volume(std::size_t nx, std::size_t ny, std::size_t nz, std::vector<float> voxels)
    : nx_(nx), ny_(ny), nz_(nz), voxels_(std::move(voxels)) {
  if (voxels_.size() != nx * ny * nz) throw ShapeError("volume voxel count does not match dims");
}

Image::Image(std::size_t width, std::size_t height, float fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

Image::Image(std::size_t width, std::size_t height, std::vector<float> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != width * height) throw ShapeError("image pixel count does not match dims");
}

void AugmentSpec::validate() const {
  if (!(max_shift_frac >= 0.0 && max_shift_frac < 1.0)) throw RangeError("max_shift_frac must be in [0, 1)");
  if (!(hflip_prob >= 0.0 && hflip_prob <= 1.0)) throw RangeError("hflip_prob must be in [0, 1]");
  if (!(brightness_low > 0.0 && brightness_low <= brightness_high)) {
    throw RangeError("brightness range must satisfy 0 < low <= high");
  }
}

std::vector<std::uint8_t> encode_volume(const Volume& volume) {
  require_finite(volume.voxels(), "volume");
  std::vector<std::uint8_t> out;
  out.reserve(kVolumeHeaderBytes + 4 * volume.size());
  out.insert(out.end(), kVolumeMagic.begin(), kVolumeMagic.end());
  put_u32(out, static_cast<std::uint32_t>(volume.nx()));
  put_u32(out, static_cast<std::uint32_t>(volume.ny()));
  put_u32(out, static_cast<std::uint32_t>(volume.nz()));
  for (float v : volume.voxels()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Volume decode_volume(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kVolumeHeaderBytes || !std::equal(kVolumeMagic.begin(), kVolumeMagic.end(), bytes.begin())) {
    throw FormatError("bad volume magic");
  }
  const std::size_t nx = get_u32(bytes, 4), ny = get_u32(bytes, 8), nz = get_u32(bytes, 12);
  const std::size_t count = nx * ny * nz;
  if (bytes.size() - kVolumeHeaderBytes != 4 * count) {
    throw FormatError("volume payload length " + std::to_string(bytes.size() - kVolumeHeaderBytes) +
                      " does not match dims (expected " + std::to_string(4 * count) + ")");
  }
  std::vector<float> voxels(count);
  for (std::size_t i = 0; i < count; ++i) {
    voxels[i] = std::bit_cast<float>(get_u32(bytes, kVolumeHeaderBytes + 4 * i));
  }
  require_finite(voxels, "volume");
  return Volume(nx, ny, nz, std::move(voxels));
}

void write_volume(const std::filesystem::path& path, const Volume& volume) {
  const auto bytes = encode_volume(volume);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Volume read_volume(const std::filesystem::path& path) { return decode_volume(read_file(path)); }

void write_image(const std::filesystem::path& path, const Image& image) {
  write_volume(path, Volume(image.width(), image.height(), 1,
                            std::vector<float>(image.pixels().begin(), image.pixels().end())));
}

Image read_image(const std::filesystem::path& path) {
  const Volume v = read_volume(path);
  if (v.nz() != 1) throw FormatError(path.string() + ": expected a single-slice volume");
  return Image(v.nx(), v.ny(), std::vector<float>(v.voxels().begin(), v.voxels().end()));
}

Image extract_slice(const Volume& volume, std::size_t z_index) {
  if (z_index >= volume.nz()) {
    throw RangeError("slice index " + std::to_string(z_index) + " out of range [0, " +
                     std::to_string(volume.nz()) + ")");
  }
  Image out(volume.nx(), volume.ny());
  for (std::size_t y = 0; y < volume.ny(); ++y)
    for (std::size_t x = 0; x < volume.nx(); ++x) out.at(x, y) = volume.at(x, y, z_index);
  return out;
}

Rect find_crop_box(const Image& image, double threshold_frac) {
  const Rect full{0, 0, image.width(), image.height()};
  if (image.empty()) return full;
  const float peak = *std::max_element(image.pixels().begin(), image.pixels().end());
  if (!(peak > 0.0f)) return full;
  const double cut = threshold_frac * peak;

  const std::size_t w = image.width(), h = image.height();
  std::vector<int> component(image.size(), -1);
  std::vector<std::size_t> stack;
  Rect best = full;
  std::size_t best_size = 0;
  int next_id = 0;
  for (std::size_t start = 0; start < image.size(); ++start) {
    if (component[start] >= 0 || image.pixels()[start] < cut) continue;
    const int id = next_id++;
    std::size_t size = 0, x_min = w, x_max = 0, y_min = h, y_max = 0;
    component[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const std::size_t x = p % w, y = p / w;
      ++size;
      x_min = std::min(x_min, x), x_max = std::max(x_max, x);
      y_min = std::min(y_min, y), y_max = std::max(y_max, y);
      auto visit = [&](std::size_t q) {
        if (component[q] < 0 && image.pixels()[q] >= cut) {
          component[q] = id;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    if (size > best_size) {
      best_size = size;
      best = {x_min, y_min, x_max - x_min + 1, y_max - y_min + 1};
    }
  }
  return best;
}

Image crop(const Image& image, const Rect& box) {
  if (box.x0 + box.width > image.width() || box.y0 + box.height > image.height()) {
    throw RangeError("crop box exceeds image bounds");
  }
  Image out(box.width, box.height);
  for (std::size_t y = 0; y < box.height; ++y)
    for (std::size_t x = 0; x < box.width; ++x) out.at(x, y) = image.at(box.x0 + x, box.y0 + y);
  return out;
}

Image contour_crop(const Image& image, double threshold_frac) {
  if (!(threshold_frac > 0.0 && threshold_frac < 1.0)) throw RangeError("threshold_frac must be in (0, 1)");
  return crop(image, find_crop_box(image, threshold_frac));
}

Image resize_bilinear(const Image& image, std::size_t out_w, std::size_t out_h) {
  if (out_w == 0 || out_h == 0) throw RangeError("resize target must be at least 1x1");
  if (image.empty()) throw RangeError("cannot resize an empty image");
  if (out_w == image.width() && out_h == image.height()) return image;

  // Corner-aligned: output corners map exactly onto input corners.
  auto scale = [](std::size_t in, std::size_t out) {
    return out > 1 ? static_cast<double>(in - 1) / static_cast<double>(out - 1) : 0.0;
  };
  const double sx = scale(image.width(), out_w), sy = scale(image.height(), out_h);
  Image out(out_w, out_h);
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    const double fy = oy * sy;
    const std::size_t y0 = std::min(static_cast<std::size_t>(fy), image.height() - 1);
    const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
    const double ty = fy - y0;
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      const double fx = ox * sx;
      const std::size_t x0 = std::min(static_cast<std::size_t>(fx), image.width() - 1);
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const double tx = fx - x0;
      const double top = (1.0 - tx) * image.at(x0, y0) + tx * image.at(x1, y0);
      const double bottom = (1.0 - tx) * image.at(x0, y1) + tx * image.at(x1, y1);
      out.at(ox, oy) = static_cast<float>((1.0 - ty) * top + ty * bottom);
    }
  }
  return out;
}

Image normalize_intensity(const Image& image) {
  if (image.empty()) throw RangeError("cannot normalize an empty image");
  const auto [lo_it, hi_it] = std::minmax_element(image.pixels().begin(), image.pixels().end());
  const double lo = *lo_it, hi = *hi_it;
  Image out(image.width(), image.height());
  if (hi == lo) return out;
  const double inv = 1.0 / (hi - lo);
  std::transform(image.pixels().begin(), image.pixels().end(), out.pixels().begin(),
                 [&](float v) { return static_cast<float>(std::clamp((v - lo) * inv, 0.0, 1.0)); });
  return out;
}

Image flip_horizontal(const Image& image) {
  Image out(image.width(), image.height());
  for (std::size_t y = 0; y < image.height(); ++y)
    for (std::size_t x = 0; x < image.width(); ++x) out.at(x, y) = image.at(image.width() - 1 - x, y);
  return out;
}

Image shift(const Image& image, long dx, long dy) {
  Image out(image.width(), image.height());
  const long w = static_cast<long>(image.width()), h = static_cast<long>(image.height());
  for (long y = 0; y < h; ++y) {
    const long sy = y - dy;
    if (sy < 0 || sy >= h) continue;
    for (long x = 0; x < w; ++x) {
      const long sx = x - dx;
      if (sx < 0 || sx >= w) continue;
      out.at(x, y) = image.at(sx, sy);
    }
  }
  return out;
}

Image augment(const Image& image, const AugmentSpec& spec, std::uint64_t draw_index) {
  spec.validate();
  Rng rng(derive_seed(spec.rng_seed, draw_index));
  // Every draw is consumed even when its transform is disabled so the
  // stream layout does not depend on the spec values.
  const double fx = uniform(rng, -spec.max_shift_frac, spec.max_shift_frac);
  const double fy = uniform(rng, -spec.max_shift_frac, spec.max_shift_frac);
  const bool flip = uniform01(rng) < spec.hflip_prob;
  const double gain = uniform(rng, spec.brightness_low, spec.brightness_high);

  const long dx = std::lround(fx * static_cast<double>(image.width()));
  const long dy = std::lround(fy * static_cast<double>(image.height()));
  Image out = (dx != 0 || dy != 0) ? shift(image, dx, dy) : image;
  if (flip) out = flip_horizontal(out);
  if (gain != 1.0) {
    for (float& v : out.pixels()) v = static_cast<float>(std::clamp(v * gain, 0.0, 1.0));
  }
  return out;
}

PreprocessedSlice preprocess_volume(const Volume& volume, const PreprocessConfig& config) {
  const Image slice = extract_slice(volume, config.slice_index);
  const Rect box = find_crop_box(slice, config.crop_threshold);
  Image image = resize_bilinear(crop(slice, box), config.output_size, config.output_size);
  return {normalize_intensity(image), box};
}

Image preprocess_mask(const Volume& mask, const Rect& crop_box, const PreprocessConfig& config) {
  Image resized = resize_bilinear(crop(extract_slice(mask, config.slice_index), crop_box),
                                  config.output_size, config.output_size);
  for (float& v : resized.pixels()) v = v >= 0.5f ? 1.0f : 0.0f;
  return resized;
}

}  // namespace datlime

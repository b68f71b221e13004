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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "datlime/imaging.hpp"

namespace datlime {

/// Per-pixel segment ids in [0, k), row-major.
struct SuperpixelMap {
  std::size_t width = 0, height = 0, k = 0;
  std::vector<std::uint32_t> labels;

  std::uint32_t at(std::size_t x, std::size_t y) const { return labels[y * width + x]; }

  /// Pixel indices (row-major) of one segment, ascending.
  std::vector<std::size_t> pixels_of(std::uint32_t id) const;
  std::vector<std::size_t> segment_sizes() const;

  /// Throws GeometryError unless ids are contiguous, in range, and every
  /// segment is 4-connected.
  void validate() const;
};

struct SlicConfig {
  std::size_t target_k = 40;
  double compactness = 10.0;
  int iterations = 10;
};

/// Cluster count along x and y for a target k on a width x height frame.
std::pair<std::size_t, std::size_t> slic_grid(std::size_t width, std::size_t height, std::size_t target_k);

/// SLIC on (100 * intensity, x, y) followed by a connectivity pass that
/// folds stray fragments into their closest-intensity neighbour. The realized
/// k can differ from the target.
SuperpixelMap segment_slic(const Image& image, const SlicConfig& config);
SuperpixelMap segment_slic(const Image& image, std::size_t target_k, double compactness = 10.0);

}  // namespace datlime

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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datlime/classifier.hpp"
#include "datlime/imaging.hpp"
#include "datlime/png.hpp"
#include "datlime/slic.hpp"

namespace datlime {

using Mask = std::vector<std::uint8_t>;

struct PerturbationSample {
  Mask mask;
  double predicted_prob = 0;
};

struct ProximityKernel {
  double width = 0.25;
};

struct Surrogate {
  double intercept = 0;
  std::vector<double> weights;
  double residual_norm = 0;  // sqrt of the kernel-weighted squared residual
};

struct ExplainConfig {
  std::size_t target_k_superpixels = 40;
  double compactness = 10.0;
  std::size_t n_samples = 1000;
  double p_off = 0.5;
  double ridge_lambda = 1.0;
  double kernel_width = 0.25;
  std::size_t top_k_display = 5;
  float replacement_value = 0.0f;
  std::uint64_t rng_seed = 0;
  bool exhaustive = false;  // all 2^k masks instead of random draws; k <= 16

  void validate() const;
};

inline constexpr std::size_t kMaxExhaustiveK = 16;

struct RankedSuperpixel {
  std::uint32_t id = 0;
  double weight = 0;
  int sign = 0;  // +1 supports PD, -1 opposes
};

struct Explanation {
  std::vector<RankedSuperpixel> ranked;
  Surrogate surrogate;
  ExplainConfig config;
  SuperpixelMap map;
  double original_prob = 0;
};

/// Pixels in segments whose mask bit is 0 become `replacement_value`.
Image perturb(const Image& image, const SuperpixelMap& map, std::span<const std::uint8_t> mask,
              float replacement_value);

/// Cosine distance to the all-ones mask; an all-zero mask has distance 1.
double cosine_distance(std::span<const std::uint8_t> mask);
double kernel_weight(std::span<const std::uint8_t> mask, const ProximityKernel& kernel);

/// Mask i of the exhaustive design switches off exactly the bits set in i,
/// so mask 0 is all-ones.
std::vector<Mask> exhaustive_masks(std::size_t k);
/// Sample 0 is all-ones; the rest draw each bit off with probability p_off.
std::vector<Mask> random_masks(std::size_t k, std::size_t n, double p_off, std::uint64_t seed);

std::vector<PerturbationSample> sample_perturbations(const Image& image, const SuperpixelMap& map,
                                                     const BlackBoxClassifier& clf, const ExplainConfig& config);

/// Kernel-weighted ridge regression of predicted_prob on the mask bits with
/// an unpenalized intercept, solved by Cholesky in double precision.
Surrogate fit_surrogate(std::span<const PerturbationSample> samples, const ProximityKernel& kernel, double lambda);

/// All superpixels by |weight| descending (ties to the lower id).
std::vector<RankedSuperpixel> rank_superpixels(const Surrogate& surrogate);

Explanation explain(const Image& image, const BlackBoxClassifier& clf, const ExplainConfig& config);

/// Ids of the n largest positive weights, strongest first.
std::vector<std::uint32_t> top_positive(const Surrogate& surrogate, std::size_t n);

/// Grayscale base with ranked superpixels tinted green (positive) or red
/// (negative). Boundary pixels are drawn in the segment's hue when tinted,
/// yellow otherwise.
RgbImage render_overlay(const Image& image, const Explanation& explanation, const SuperpixelMap& map);

/// Config echo, realized k, ranked list, intercept, residual norm.
std::string explanation_json(const Explanation& explanation, std::string_view provenance_json = {});

}  // namespace datlime

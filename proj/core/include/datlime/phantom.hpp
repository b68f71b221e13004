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
#include <string>
#include <string_view>
#include <vector>

#include "datlime/imaging.hpp"

namespace datlime {

enum class ClassLabel : std::uint8_t { HC = 0, PD = 1 };

std::string_view to_string(ClassLabel label);
/// Accepts "PD"/"HC" (case-insensitive) or "1"/"0".
ClassLabel parse_label(std::string_view text);
inline int as_binary(ClassLabel label) { return label == ClassLabel::PD ? 1 : 0; }

/// Voxel-space point (x across, y anterior to posterior, z axial).
struct Vec3 {
  double x = 0, y = 0, z = 0;
  bool operator==(const Vec3&) const = default;
};

/// Ground-truth geometry of one synthetic scan. Index 0 is the left
/// hemisphere (smaller x), index 1 the right.
struct PhantomSpec {
  ClassLabel class_label = ClassLabel::HC;
  std::array<Vec3, 2> caudate_centers{};
  std::array<Vec3, 2> putamen_centers{};
  double intensity_scale = 1.0;  ///< putamen uptake relative to the caudate
  double putamen_shrink = 0.0;   ///< fraction of putamen length lost posteriorly
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;

  /// Throws GeometryError for centers outside the grid and RangeError
  /// for out-of-domain scalars or a class/shrink mismatch.
  void validate() const;

  /// Canonical healthy geometry with no noise.
  static PhantomSpec healthy();
};

/// Rendering constants shared by every phantom.
struct PhantomStyle {
  float striatal_peak = 1.0f;
  float background_level = 0.2f;
  Vec3 brain_center{45.0, 54.0, 45.0};
  Vec3 brain_radii{37.0, 47.0, 35.0};
  Vec3 caudate_radii{5.5, 7.0, 6.0};
  Vec3 putamen_radii{4.5, 11.0, 5.5};
  double putamen_tilt_deg = 25.0;  ///< posterior end rotated laterally
  double edge_width = 0.3;         ///< soft rim, in units of ellipsoid radius
};

struct Phantom {
  Volume volume;
  Volume roi_mask;  ///< 1 on every striatal voxel of the unshrunk geometry
};

Phantom generate_phantom(const PhantomSpec& spec, const PhantomStyle& style = {});

struct DatasetConfig {
  double pd_shrink_low = 0.3, pd_shrink_high = 0.7;
  double pd_intensity_low = 0.55, pd_intensity_high = 0.85;
  double hc_intensity_low = 0.9, hc_intensity_high = 1.0;
  double center_jitter = 2.0;  ///< uniform +- voxels per coordinate
  double noise_sigma = 0.02;
};

/// One dataset member before its volume is rendered.
struct DatasetEntry {
  std::string volume_id;
  ClassLabel label = ClassLabel::HC;
  PhantomSpec spec;
};

struct LabeledVolume {
  std::string volume_id;
  ClassLabel label = ClassLabel::HC;
  PhantomSpec spec;
  Volume volume;
};

struct LabeledVolumeSet {
  std::vector<LabeledVolume> entries;
  std::size_t count(ClassLabel label) const;
};

inline constexpr std::size_t kCohortPdCount = 430;
inline constexpr std::size_t kCohortHcCount = 212;

/// Deterministic per-entry specs: PD entries first ("pd-0000", ...),
/// then HC ("hc-0000", ...). A pure function of its arguments.
std::vector<DatasetEntry> plan_dataset(std::size_t n_pd, std::size_t n_hc, std::uint64_t master_seed,
                                       const DatasetConfig& config = {});

/// plan_dataset followed by rendering every volume.
LabeledVolumeSet generate_dataset(std::size_t n_pd, std::size_t n_hc, std::uint64_t master_seed,
                                  const DatasetConfig& config = {}, const PhantomStyle& style = {});

/// CRC-32 of the encoded volume bytes.
std::uint32_t volume_checksum(const Volume& volume);

struct ManifestRow {
  std::string volume_id;
  ClassLabel label = ClassLabel::HC;
  std::string path;
  double shrink = 0.0;
  std::uint64_t seed = 0;
};

/// CSV `volume_id,label,path,shrink,seed`. Lines starting with '#' are
/// provenance comments and are skipped on read.
void write_dataset_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows,
                            std::string_view comment = {});
std::vector<ManifestRow> read_dataset_manifest(const std::filesystem::path& path);

}  // namespace datlime

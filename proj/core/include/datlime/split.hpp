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
#include <string>
#include <string_view>
#include <vector>

#include "datlime/phantom.hpp"

namespace datlime {

enum class Partition : std::uint8_t { Train = 0, Validation = 1, Test = 2 };
std::string_view to_string(Partition p);
Partition parse_partition(std::string_view text);

struct SplitRatios {
  double train = 0.8, validation = 0.1, test = 0.1;
};

struct LabeledId {
  std::string id;
  ClassLabel label = ClassLabel::HC;
};

struct DatasetSplit {
  std::vector<LabeledId> train, validation, test;

  const std::vector<LabeledId>& part(Partition p) const;
  /// Count of `label` inside partition `p`.
  std::size_t count(Partition p, ClassLabel label) const;
};

/// Per-class size of the validation or test share: the largest integer
/// strictly below ratio * n (0 for a zero ratio). Train takes the rest.
std::size_t holdout_size(std::size_t n, double ratio);

/// Stratified split; each class is shuffled with `seed` and cut into
/// train/validation/test. Throws StratificationError when a class is
/// empty while its ratios are nonzero.
DatasetSplit split_dataset(std::span<const LabeledId> items, const SplitRatios& ratios, std::uint64_t seed);
DatasetSplit split_dataset(const LabeledVolumeSet& set, const SplitRatios& ratios, std::uint64_t seed);

/// CSV `volume_id,label,partition`.
void write_split(const std::filesystem::path& path, const DatasetSplit& split, std::string_view comment = {});
DatasetSplit read_split(const std::filesystem::path& path);

}  // namespace datlime

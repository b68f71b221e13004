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

#include "datlime/split.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "datlime/csv.hpp"
#include "datlime/error.hpp"
#include "datlime/rng.hpp"

namespace datlime {

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Validation: return "val";
    case Partition::Test: return "test";
  }
  return "?";
}

Partition parse_partition(std::string_view text) {
  if (text == "train") return Partition::Train;
  if (text == "val" || text == "validation") return Partition::Validation;
  if (text == "test") return Partition::Test;
  throw FormatError("unknown partition '" + std::string(text) + "'");
}

const std::vector<LabeledId>& DatasetSplit::part(Partition p) const {
  switch (p) {
    case Partition::Train: return train;
    case Partition::Validation: return validation;
    case Partition::Test: return test;
  }
  return train;
}

std::size_t DatasetSplit::count(Partition p, ClassLabel label) const {
  const auto& items = part(p);
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [&](const LabeledId& i) { return i.label == label; }));
}

std::size_t holdout_size(std::size_t n, double ratio) {
  if (ratio <= 0.0 || n == 0) return 0;
  const double exact = ratio * static_cast<double>(n);
  // ceil(x) - 1 is the largest integer strictly below x; the tolerance
  // absorbs representation error so 0.1 * 430 counts as exactly 43.
  const double below = std::ceil(exact - 1e-9) - 1.0;
  return below <= 0.0 ? 0 : std::min(n, static_cast<std::size_t>(below));
}

DatasetSplit split_dataset(std::span<const LabeledId> items, const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw RangeError("split ratios must be non-negative and sum to 1");
  }
  std::set<std::string_view> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) throw ValidationError("duplicate volume id '" + item.id + "'");
  }

  DatasetSplit split;
  for (ClassLabel label : {ClassLabel::PD, ClassLabel::HC}) {
    std::vector<LabeledId> members;
    for (const auto& item : items)
      if (item.label == label) members.push_back(item);
    if (members.empty()) {
      throw StratificationError("class " + std::string(to_string(label)) + " is empty; cannot stratify");
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    // Fisher-Yates with the portable uniform draw.
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
      std::swap(members[i], members[std::min(j, i)]);
    }
    const std::size_t n_val = holdout_size(members.size(), ratios.validation);
    const std::size_t n_test = holdout_size(members.size(), ratios.test);
    const std::size_t n_train = members.size() - std::min(members.size(), n_val + n_test);
    auto it = members.begin();
    split.train.insert(split.train.end(), it, it + n_train);
    it += n_train;
    split.validation.insert(split.validation.end(), it, it + n_val);
    it += n_val;
    split.test.insert(split.test.end(), it, members.end());
  }
  return split;
}

DatasetSplit split_dataset(const LabeledVolumeSet& set, const SplitRatios& ratios, std::uint64_t seed) {
  std::vector<LabeledId> items;
  items.reserve(set.entries.size());
  for (const auto& e : set.entries) items.push_back({e.volume_id, e.label});
  return split_dataset(items, ratios, seed);
}

void write_split(const std::filesystem::path& path, const DatasetSplit& split, std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "volume_id,label,partition\n";
  for (Partition p : {Partition::Train, Partition::Validation, Partition::Test}) {
    for (const auto& item : split.part(p)) out << item.id << ',' << to_string(item.label) << ',' << to_string(p) << '\n';
  }
  write_text_file(path, out.str());
}

DatasetSplit read_split(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_id = t.column("volume_id"), c_label = t.column("label"), c_part = t.column("partition");
  DatasetSplit split;
  for (const auto& r : t.rows) {
    LabeledId item{r[c_id], parse_label(r[c_label])};
    switch (parse_partition(r[c_part])) {
      case Partition::Train: split.train.push_back(std::move(item)); break;
      case Partition::Validation: split.validation.push_back(std::move(item)); break;
      case Partition::Test: split.test.push_back(std::move(item)); break;
    }
  }
  return split;
}

}  // namespace datlime

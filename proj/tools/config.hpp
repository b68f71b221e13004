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
#include <map>
#include <string>
#include <string_view>

#include "datlime/imaging.hpp"
#include "datlime/lime.hpp"
#include "datlime/metrics.hpp"
#include "datlime/optim.hpp"
#include "datlime/phantom.hpp"
#include "datlime/split.hpp"

namespace datlime::cli {

/// Flat `section.key -> value` settings with typed validation. Values are
/// stored in canonical text form so equal settings hash equally.
class Settings {
 public:
  /// Every known key at its default.
  Settings();

  /// Throws ValidationError for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  const std::string& get(std::string_view key) const;

  /// INI-style text: `[section]` headers, `key = value`, '#' or ';' comments.
  void merge_ini(std::string_view text, std::string_view source = "config");
  void merge_ini_file(const std::filesystem::path& path);

  /// Sorted `key=value` lines.
  std::string canonical() const;
  /// INI text that merge_ini reads back to the same settings.
  std::string to_ini() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> defs_;
  std::map<std::string, std::string> values_;
};

/// 64-bit FNV-1a over the canonical settings, as 16 hex digits.
std::string config_hash(const Settings& settings);

enum class Architecture { Compact, Transfer };

struct RunConfig {
  std::uint64_t seed = 0;
  std::string hash;

  std::size_t n_pd = 0, n_hc = 0;
  DatasetConfig dataset;
  PreprocessConfig preprocess;
  SplitRatios ratios;

  Architecture architecture = Architecture::Compact;
  float dropout = 0.5f;
  bool freeze = false;
  OptimizerConfig optimizer;
  AugmentSpec augment;

  Criterion criterion = Criterion::GMean;
  Partition calibrate_on = Partition::Validation;

  ExplainConfig explain;
  std::size_t explain_count = 0;
  Partition explain_partition = Partition::Test;

  /// `config_hash=... seed=...` for CSV comment lines.
  std::string provenance_comment() const;
  /// {"config_hash": ..., "seed": ...} as JSON text.
  std::string provenance_json(std::string_view stage) const;
};

RunConfig resolve(const Settings& settings);

// Seed streams derived from the run seed.
inline constexpr std::uint64_t kSplitStream = 1;
inline constexpr std::uint64_t kInitStream = 2;
inline constexpr std::uint64_t kTrainStream = 3;
inline constexpr std::uint64_t kAugmentStream = 4;
inline constexpr std::uint64_t kExplainStream = 5;

}  // namespace datlime::cli

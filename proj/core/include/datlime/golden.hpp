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

#include <filesystem>
#include <string>
#include <vector>

#include "datlime/metrics.hpp"

namespace datlime::golden {

/// A reference confusion table with its printed metric percentages
/// (as fractions) and the kappa/F1 reported alongside it.
struct CountsTable {
  ConfusionCounts counts;
  double accuracy = 0, specificity = 0, sensitivity = 0, precision = 0;
  double reported_kappa = 0, reported_f1 = 0;
};

struct Tables {
  CountsTable table5, table8;
  std::vector<ThresholdRow> table6;
  std::vector<PrRow> table7;
};

inline constexpr double kRocOptimalThreshold = 0.8335;
inline constexpr double kRocOptimalGMean = 0.9418;
inline constexpr double kPrOptimalThreshold = 0.8334;
inline constexpr double kPrOptimalFMeasure = 0.9638;

/// Embedded copies of the reference tables.
const Tables& embedded_tables();

/// Reads table5.csv ... table8.csv from a fixture directory. Count tables
/// use `metric,value` rows; tables 6 and 7 use the ROC and PR CSV schemas.
Tables read_tables(const std::filesystem::path& dir);
void write_tables(const std::filesystem::path& dir, const Tables& tables);

/// 63 test-set probabilities (41 PD, 22 HC) consistent with every row of the
/// reference ROC and PR tables: threshold 0.5 yields the first confusion
/// table and the calibrated threshold yields the second.
struct ProbabilityFixture {
  std::vector<double> probs;
  std::vector<int> labels;
};
const ProbabilityFixture& calibration_fixture();

struct CheckResult {
  std::string table;
  bool matched = false;
  std::string detail;
};

/// Recomputes each table from counts, rows and the probability fixture and
/// compares against the printed values at their printed precision.
std::vector<CheckResult> check_tables(const Tables& tables);

}  // namespace datlime::golden

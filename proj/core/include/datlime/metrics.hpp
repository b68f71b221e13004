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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace datlime {

struct ConfusionCounts {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Bits set in MetricSummary::undefined when a denominator was zero.
enum MetricFlag : unsigned {
  kUndefinedSpecificity = 1u << 0,
  kUndefinedSensitivity = 1u << 1,
  kUndefinedPrecision = 1u << 2,
  kUndefinedF1 = 1u << 3,
  kUndefinedKappa = 1u << 4,
};

struct MetricSummary {
  double accuracy = 0, specificity = 0, sensitivity = 0, precision = 0, f1 = 0, cohen_kappa = 0;
  unsigned undefined = 0;

  bool is_undefined(MetricFlag flag) const { return (undefined & flag) != 0; }
  bool operator==(const MetricSummary&) const = default;
};

struct ThresholdRow {
  double threshold = 0;
  double tpr = 0, fpr = 0, specificity = 0;
  double lr_plus = 0;  // meaningful only when lr_plus_defined
  bool lr_plus_defined = false;
  double youden = 0, g_mean = 0;
};

struct PrRow {
  double threshold = 0;
  double precision = 0, recall = 0, f_measure = 0;
};

enum class Criterion { GMean, FMeasure };

std::string to_string(Criterion c);
/// Accepts gmean, g_mean, fmeasure, f_measure.
Criterion parse_criterion(std::string_view text);

struct CalibrationResult {
  double default_threshold = 0.5;
  double optimal_threshold = 0;
  Criterion criterion = Criterion::GMean;
  double criterion_value = 0;
  std::size_t row_index = 0;
  std::optional<double> auc;
  std::optional<MetricSummary> before, after;
  std::optional<ConfusionCounts> before_counts, after_counts;
};

/// p >= threshold counts as positive. Labels must be 0 or 1.
ConfusionCounts confusion_at_threshold(std::span<const double> probs, std::span<const int> labels, double threshold);

MetricSummary summary_metrics(const ConfusionCounts& c);

/// Sentinel row at max(prob) + 1 followed by one row per distinct
/// probability, descending. Requires both classes.
std::vector<ThresholdRow> roc_table(std::span<const double> probs, std::span<const int> labels);

/// One row per distinct probability, ascending. Requires a positive.
std::vector<PrRow> pr_table(std::span<const double> probs, std::span<const int> labels);

/// Trapezoid of tpr over fpr; (0,0) and (1,1) are added when missing.
double auc_trapezoid(std::span<const ThresholdRow> rows);

/// Argmax of g_mean (ROC rows) or f_measure (PR rows); ties go to the
/// highest threshold. The ROC overload also fills auc when it can.
CalibrationResult select_threshold(std::span<const ThresholdRow> rows);
CalibrationResult select_threshold(std::span<const PrRow> rows);

/// Sweeps the given probabilities and fills before/after summaries.
CalibrationResult calibrate(std::span<const double> probs, std::span<const int> labels, Criterion criterion,
                            double default_threshold = 0.5);

inline constexpr std::string_view kRocCsvHeader = "no,threshold,tpr,fpr,specificity,lr_plus,youden,g_mean";
inline constexpr std::string_view kPrCsvHeader = "no,threshold,precision,recall,f_measure";

/// Undefined LR+ is written as "-". `comment` becomes a leading '#' line.
std::string format_roc_csv(std::span<const ThresholdRow> rows, std::string_view comment = {});
std::string format_pr_csv(std::span<const PrRow> rows, std::string_view comment = {});
void write_roc_csv(const std::filesystem::path& path, std::span<const ThresholdRow> rows, std::string_view comment = {});
void write_pr_csv(const std::filesystem::path& path, std::span<const PrRow> rows, std::string_view comment = {});
std::vector<ThresholdRow> read_roc_csv(const std::filesystem::path& path);
std::vector<PrRow> read_pr_csv(const std::filesystem::path& path);

}  // namespace datlime

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

#include "datlime/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "datlime/csv.hpp"
#include "datlime/error.hpp"

namespace datlime {

namespace {

void check_inputs(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) {
    throw ShapeError("probabilities and labels differ in length (" + std::to_string(probs.size()) + " vs " +
                     std::to_string(labels.size()) + ")");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw RangeError("labels must be 0 or 1");
  }
  for (double p : probs) {
    if (!std::isfinite(p)) throw RangeError("probabilities must be finite");
  }
}

double ratio(double num, double den, unsigned flag, unsigned& undefined) {
  if (den == 0) {
    undefined |= flag;
    return 0.0;
  }
  return num / den;
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const int> labels) {
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return {pos, labels.size() - pos};
}

}  // namespace

std::string to_string(Criterion c) { return c == Criterion::GMean ? "g_mean" : "f_measure"; }

Criterion parse_criterion(std::string_view text) {
  if (text == "gmean" || text == "g_mean") return Criterion::GMean;
  if (text == "fmeasure" || text == "f_measure") return Criterion::FMeasure;
  throw ValidationError("unknown threshold criterion '" + std::string(text) + "'");
}

ConfusionCounts confusion_at_threshold(std::span<const double> probs, std::span<const int> labels, double threshold) {
  check_inputs(probs, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] >= threshold;
    if (labels[i] == 1) {
      pred ? ++c.tp : ++c.fn;
    } else {
      pred ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

MetricSummary summary_metrics(const ConfusionCounts& c) {
  const double n = static_cast<double>(c.total());
  if (c.total() == 0) throw ValidationError("summary_metrics needs at least one sample");
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);

  MetricSummary m;
  m.accuracy = (tp + tn) / n;
  m.specificity = ratio(tn, tn + fp, kUndefinedSpecificity, m.undefined);
  m.sensitivity = ratio(tp, tp + fn, kUndefinedSensitivity, m.undefined);
  m.precision = ratio(tp, tp + fp, kUndefinedPrecision, m.undefined);
  m.f1 = ratio(2 * m.precision * m.sensitivity, m.precision + m.sensitivity, kUndefinedF1, m.undefined);

  const double po = m.accuracy;
  const double pe = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
  m.cohen_kappa = ratio(po - pe, 1 - pe, kUndefinedKappa, m.undefined);
  return m;
}

std::vector<ThresholdRow> roc_table(std::span<const double> probs, std::span<const int> labels) {
  check_inputs(probs, labels);
  const auto [npos, nneg] = class_counts(labels);
  if (npos == 0 || nneg == 0) throw ValidationError("roc_table needs both classes present");

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

  const double P = static_cast<double>(npos), N = static_cast<double>(nneg);
  auto make_row = [&](double t, std::size_t tp, std::size_t fp) {
    ThresholdRow r;
    r.threshold = t;
    r.tpr = static_cast<double>(tp) / P;
    r.fpr = static_cast<double>(fp) / N;
    r.specificity = static_cast<double>(nneg - fp) / N;
    r.lr_plus_defined = fp > 0;
    r.lr_plus = r.lr_plus_defined ? r.tpr / r.fpr : 0.0;
    r.youden = r.tpr - r.fpr;
    r.g_mean = std::sqrt(r.tpr * r.specificity);
    return r;
  };

  std::vector<ThresholdRow> rows;
  rows.push_back(make_row(probs[order.front()] + 1.0, 0, 0));
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = probs[order[i]];
    for (; i < order.size() && probs[order[i]] == t; ++i) labels[order[i]] == 1 ? ++tp : ++fp;
    rows.push_back(make_row(t, tp, fp));
  }
  return rows;
}

std::vector<PrRow> pr_table(std::span<const double> probs, std::span<const int> labels) {
  check_inputs(probs, labels);
  const auto [npos, nneg] = class_counts(labels);
  if (npos == 0) throw ValidationError("pr_table needs at least one positive");
  (void)nneg;

  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

  std::vector<PrRow> rows;
  std::size_t tp = 0, predicted = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = probs[order[i]];
    for (; i < order.size() && probs[order[i]] == t; ++i, ++predicted) {
      if (labels[order[i]] == 1) ++tp;
    }
    PrRow r;
    r.threshold = t;
    r.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    r.recall = static_cast<double>(tp) / static_cast<double>(npos);
    const double s = r.precision + r.recall;
    r.f_measure = s > 0 ? 2 * r.precision * r.recall / s : 0.0;
    rows.push_back(r);
  }
  std::reverse(rows.begin(), rows.end());
  return rows;
}

double auc_trapezoid(std::span<const ThresholdRow> rows) {
  if (rows.size() < 2) throw ValidationError("auc_trapezoid needs at least two rows");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(rows.size() + 2);
  for (const auto& r : rows) {
    if (!std::isfinite(r.fpr) || !std::isfinite(r.tpr)) throw NumericError("ROC rows contain non-finite rates");
    pts.emplace_back(r.fpr, r.tpr);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.front() != std::pair{0.0, 0.0}) pts.insert(pts.begin(), {0.0, 0.0});
  if (pts.back() != std::pair{1.0, 1.0}) pts.emplace_back(1.0, 1.0);
  double area = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) * 0.5;
  }
  return area;
}

namespace {

template <class Row, class Score>
CalibrationResult argmax_rows(std::span<const Row> rows, Criterion criterion, Score score) {
  if (rows.empty()) throw ValidationError("select_threshold needs at least one row");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = score(rows[i]), b = score(rows[best]);
    if (s > b || (s == b && rows[i].threshold > rows[best].threshold)) best = i;
  }
  CalibrationResult res;
  res.criterion = criterion;
  res.row_index = best;
  res.optimal_threshold = rows[best].threshold;
  res.criterion_value = score(rows[best]);
  return res;
}

}  // namespace

CalibrationResult select_threshold(std::span<const ThresholdRow> rows) {
  auto res = argmax_rows(rows, Criterion::GMean, [](const ThresholdRow& r) { return r.g_mean; });
  if (rows.size() >= 2) res.auc = auc_trapezoid(rows);
  return res;
}

CalibrationResult select_threshold(std::span<const PrRow> rows) {
  return argmax_rows(rows, Criterion::FMeasure, [](const PrRow& r) { return r.f_measure; });
}

CalibrationResult calibrate(std::span<const double> probs, std::span<const int> labels, Criterion criterion,
                            double default_threshold) {
  const auto roc = roc_table(probs, labels);
  CalibrationResult res;
  if (criterion == Criterion::GMean) {
    res = select_threshold(std::span<const ThresholdRow>(roc));
  } else {
    const auto pr = pr_table(probs, labels);
    res = select_threshold(std::span<const PrRow>(pr));
    res.auc = auc_trapezoid(roc);
  }
  res.default_threshold = default_threshold;
  res.before_counts = confusion_at_threshold(probs, labels, default_threshold);
  res.after_counts = confusion_at_threshold(probs, labels, res.optimal_threshold);
  res.before = summary_metrics(*res.before_counts);
  res.after = summary_metrics(*res.after_counts);
  return res;
}

std::string format_roc_csv(std::span<const ThresholdRow> rows, std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << kRocCsvHeader << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i + 1 << ',' << format_double(r.threshold) << ',' << format_double(r.tpr) << ',' << format_double(r.fpr)
        << ',' << format_double(r.specificity) << ',' << (r.lr_plus_defined ? format_double(r.lr_plus) : "-") << ','
        << format_double(r.youden) << ',' << format_double(r.g_mean) << '\n';
  }
  return out.str();
}

std::string format_pr_csv(std::span<const PrRow> rows, std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << kPrCsvHeader << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i + 1 << ',' << format_double(r.threshold) << ',' << format_double(r.precision) << ','
        << format_double(r.recall) << ',' << format_double(r.f_measure) << '\n';
  }
  return out.str();
}

void write_roc_csv(const std::filesystem::path& path, std::span<const ThresholdRow> rows, std::string_view comment) {
  write_text_file(path, format_roc_csv(rows, comment));
}

void write_pr_csv(const std::filesystem::path& path, std::span<const PrRow> rows, std::string_view comment) {
  write_text_file(path, format_pr_csv(rows, comment));
}

std::vector<ThresholdRow> read_roc_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_t = t.column("threshold"), c_tpr = t.column("tpr"), c_fpr = t.column("fpr");
  const auto c_s = t.column("specificity"), c_lr = t.column("lr_plus"), c_y = t.column("youden");
  const auto c_g = t.column("g_mean");
  std::vector<ThresholdRow> rows;
  for (const auto& r : t.rows) {
    ThresholdRow row;
    row.threshold = parse_double(r[c_t]);
    row.tpr = parse_double(r[c_tpr]);
    row.fpr = parse_double(r[c_fpr]);
    row.specificity = parse_double(r[c_s]);
    row.lr_plus_defined = r[c_lr] != "-" && !r[c_lr].empty();
    row.lr_plus = row.lr_plus_defined ? parse_double(r[c_lr]) : 0.0;
    row.youden = parse_double(r[c_y]);
    row.g_mean = parse_double(r[c_g]);
    rows.push_back(row);
  }
  return rows;
}

std::vector<PrRow> read_pr_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_t = t.column("threshold"), c_p = t.column("precision"), c_r = t.column("recall");
  const auto c_f = t.column("f_measure");
  std::vector<PrRow> rows;
  for (const auto& r : t.rows) {
    rows.push_back({parse_double(r[c_t]), parse_double(r[c_p]), parse_double(r[c_r]), parse_double(r[c_f])});
  }
  return rows;
}

}  // namespace datlime

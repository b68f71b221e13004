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

#include "datlime/golden.hpp"

#include <cmath>
#include <sstream>

#include "datlime/csv.hpp"
#include "datlime/error.hpp"

namespace datlime::golden {

namespace {

ThresholdRow roc(double t, double tpr, double fpr, double spec, double lr, double youden, double g) {
  ThresholdRow r;
  r.threshold = t;
  r.tpr = tpr;
  r.fpr = fpr;
  r.specificity = spec;
  r.lr_plus_defined = lr >= 0;
  r.lr_plus = r.lr_plus_defined ? lr : 0.0;
  r.youden = youden;
  r.g_mean = g;
  return r;
}

Tables make_tables() {
  Tables t;
  t.table5 = {{40, 18, 4, 1}, 0.920, 0.818, 0.975, 0.909, 0.81, 0.94};
  t.table8 = {{40, 20, 2, 1}, 0.952, 0.909, 0.975, 0.952, 0.89, 0.96};
  // -1 marks the "-" LR+ entry.
  t.table6 = {
      roc(2, 0, 0, 1, -1, 0, 0),
      roc(1, 0.7805, 0.04545, 0.9545, 17.17, 0.735, 0.8631),
      roc(1, 0.8049, 0.04545, 0.9545, 17.71, 0.7594, 0.8765),
      roc(1, 0.8537, 0.04545, 0.9545, 18.78, 0.8082, 0.9027),
      roc(1, 0.878, 0.04545, 0.9545, 19.32, 0.8326, 0.9155),
      roc(1, 0.878, 0.09091, 0.9091, 9.659, 0.7871, 0.8934),
      roc(0.8335, 0.9756, 0.09091, 0.9091, 10.73, 0.8847, 0.9418),
      roc(8.815e-08, 0.9756, 0.6818, 0.3182, 1.431, 0.2938, 0.5572),
      roc(3.193e-08, 1, 0.6818, 0.3182, 1.467, 0.3182, 0.5641),
      roc(2.918e-10, 1, 1, 0, 1, 0, 0),
  };
  t.table7 = {
      {3.193e-08, 0.7321, 1, 0.8453},     {8.814e-08, 0.7272, 0.9756, 0.8333}, {1.865e-07, 0.7407, 0.9756, 0.8421},
      {4.164e-07, 0.7547, 0.9756, 0.8510}, {5.929e-07, 0.7692, 0.9756, 0.8602}, {1.611e-06, 0.7843, 0.9756, 0.8695},
      {1.130e-05, 0.8000, 0.9756, 0.8791}, {1.851e-05, 0.8163, 0.9756, 0.8888}, {0.0003, 0.8333, 0.9756, 0.8988},
      {0.0019, 0.8510, 0.9756, 0.9090},    {0.0051, 0.8695, 0.9756, 0.9195},    {0.0617, 0.8888, 0.9756, 0.9302},
      {0.6687, 0.9090, 0.9756, 0.9411},    {0.8135, 0.9302, 0.9756, 0.9523},    {0.8334, 0.9523, 0.9756, 0.9638},
      {0.9985, 0.9512, 0.9512, 0.9512},    {0.9992, 0.9500, 0.9268, 0.9382},    {0.9999, 0.9487, 0.9024, 0.9250},
      {0.9999, 0.9473, 0.8780, 0.9113},    {0.9999, 0.9729, 0.8780, 0.9230},    {1, 0.9722, 0.8536, 0.9090},
      {1, 0.9705, 0.8048, 0.8800},         {1, 0.9696, 0.7804, 0.8648},
  };
  return t;
}

ProbabilityFixture make_fixture() {
  ProbabilityFixture f;
  auto add = [&](double p, int y, int n = 1) {
    for (int i = 0; i < n; ++i) {
      f.probs.push_back(p);
      f.labels.push_back(y);
    }
  };
  add(1.0, 1, 32);
  add(1.0, 0);
  add(0.99999994, 1);
  add(0.9999999, 1, 2);
  add(0.99995, 1);
  add(0.99992, 0);
  add(0.99991, 1);
  add(0.9992, 1);
  add(0.9985, 1);
  add(0.8335, 1);
  for (double p : {0.8135, 0.6687, 0.0617, 0.0051, 0.0019, 0.0003, 1.851e-05, 1.130e-05, 1.611e-06, 5.929e-07,
                   4.164e-07, 1.865e-07, 8.815e-08}) {
    add(p, 0);
  }
  add(3.193e-08, 1);
  for (double p : {1e-08, 5e-09, 2e-09, 1e-09, 7e-10, 5e-10, 2.918e-10}) add(p, 0);
  return f;
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// Printed percentages carry one decimal and at least one of them is truncated.
constexpr double kPercentTol = 1e-3;
// Four-digit table entries, rounded or truncated.
constexpr double kRowTol = 5e-4;

void check_counts(const CountsTable& t, const ConfusionCounts& from_fixture, std::ostringstream& why, bool& ok) {
  const auto m = summary_metrics(t.counts);
  const std::pair<const char*, std::pair<double, double>> items[] = {
      {"accuracy", {m.accuracy, t.accuracy}},
      {"specificity", {m.specificity, t.specificity}},
      {"sensitivity", {m.sensitivity, t.sensitivity}},
      {"precision", {m.precision, t.precision}},
  };
  for (const auto& [name, v] : items) {
    if (!near(v.first, v.second, kPercentTol)) {
      ok = false;
      why << name << " " << v.first << " vs " << v.second << "; ";
    }
  }
  if (!(from_fixture == t.counts)) {
    ok = false;
    why << "fixture counts differ; ";
  }
}

}  // namespace

const Tables& embedded_tables() {
  static const Tables t = make_tables();
  return t;
}

const ProbabilityFixture& calibration_fixture() {
  static const ProbabilityFixture f = make_fixture();
  return f;
}

namespace {

CountsTable read_counts(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_m = t.column("metric"), c_v = t.column("value");
  CountsTable out;
  int seen = 0;
  for (const auto& r : t.rows) {
    const std::string& k = r[c_m];
    const std::string& v = r[c_v];
    ++seen;
    if (k == "tp") out.counts.tp = parse_uint(v);
    else if (k == "tn") out.counts.tn = parse_uint(v);
    else if (k == "fp") out.counts.fp = parse_uint(v);
    else if (k == "fn") out.counts.fn = parse_uint(v);
    else if (k == "accuracy") out.accuracy = parse_double(v);
    else if (k == "specificity") out.specificity = parse_double(v);
    else if (k == "sensitivity") out.sensitivity = parse_double(v);
    else if (k == "precision") out.precision = parse_double(v);
    else if (k == "kappa") out.reported_kappa = parse_double(v);
    else if (k == "f1") out.reported_f1 = parse_double(v);
    else throw FormatError("unknown metric '" + k + "' in " + path.string());
  }
  if (seen != 10) throw FormatError(path.string() + ": expected 10 metric rows");
  return out;
}

std::string format_counts(const CountsTable& t) {
  std::ostringstream out;
  out << "metric,value\n"
      << "tp," << t.counts.tp << "\ntn," << t.counts.tn << "\nfp," << t.counts.fp << "\nfn," << t.counts.fn
      << "\naccuracy," << format_double(t.accuracy) << "\nspecificity," << format_double(t.specificity)
      << "\nsensitivity," << format_double(t.sensitivity) << "\nprecision," << format_double(t.precision)
      << "\nkappa," << format_double(t.reported_kappa) << "\nf1," << format_double(t.reported_f1) << '\n';
  return out.str();
}

}  // namespace

Tables read_tables(const std::filesystem::path& dir) {
  Tables t;
  t.table5 = read_counts(dir / "table5.csv");
  t.table6 = read_roc_csv(dir / "table6.csv");
  t.table7 = read_pr_csv(dir / "table7.csv");
  t.table8 = read_counts(dir / "table8.csv");
  return t;
}

void write_tables(const std::filesystem::path& dir, const Tables& tables) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "table5.csv", format_counts(tables.table5));
  write_roc_csv(dir / "table6.csv", tables.table6);
  write_pr_csv(dir / "table7.csv", tables.table7);
  write_text_file(dir / "table8.csv", format_counts(tables.table8));
}

std::vector<CheckResult> check_tables(const Tables& tables) {
  const auto& fx = calibration_fixture();
  const auto fx_roc = roc_table(fx.probs, fx.labels);
  const auto fx_pr = pr_table(fx.probs, fx.labels);
  std::vector<CheckResult> out;

  {
    std::ostringstream why;
    bool ok = true;
    check_counts(tables.table5, confusion_at_threshold(fx.probs, fx.labels, 0.5), why, ok);
    out.push_back({"table5", ok, why.str()});
  }
  {
    std::ostringstream why;
    bool ok = !tables.table6.empty();
    for (std::size_t i = 0; i < tables.table6.size(); ++i) {
      const auto& r = tables.table6[i];
      bool row_ok = near(r.youden, r.tpr - r.fpr, kRowTol) && near(r.specificity, 1 - r.fpr, kRowTol) &&
                    near(r.g_mean, std::sqrt(r.tpr * r.specificity), kRowTol);
      if (r.lr_plus_defined) row_ok = row_ok && r.fpr > 0 && near(r.lr_plus, r.tpr / r.fpr, 1e-3 * r.lr_plus);
      else row_ok = row_ok && r.fpr == 0;
      bool found = false;
      for (const auto& q : fx_roc) found = found || (near(q.tpr, r.tpr, kRowTol) && near(q.fpr, r.fpr, kRowTol));
      if (!row_ok || !found) {
        ok = false;
        why << "row " << i + 1 << (row_ok ? " missing from fixture curve; " : " inconsistent; ");
      }
    }
    if (ok) {
      const auto sel = select_threshold(std::span<const ThresholdRow>(tables.table6));
      if (sel.optimal_threshold != kRocOptimalThreshold || !near(sel.criterion_value, kRocOptimalGMean, 1e-12)) {
        ok = false;
        why << "selected " << sel.optimal_threshold << "; ";
      }
    }
    out.push_back({"table6", ok, why.str()});
  }
  {
    std::ostringstream why;
    bool ok = !tables.table7.empty();
    for (std::size_t i = 0; i < tables.table7.size(); ++i) {
      const auto& r = tables.table7[i];
      const double s = r.precision + r.recall;
      const bool row_ok = near(r.f_measure, s > 0 ? 2 * r.precision * r.recall / s : 0.0, kRowTol);
      bool found = false;
      for (const auto& q : fx_pr) {
        found = found || (near(q.precision, r.precision, kRowTol) && near(q.recall, r.recall, kRowTol));
      }
      if (!row_ok || !found) {
        ok = false;
        why << "row " << i + 1 << (row_ok ? " missing from fixture curve; " : " inconsistent; ");
      }
    }
    if (ok) {
      const auto sel = select_threshold(std::span<const PrRow>(tables.table7));
      if (sel.optimal_threshold != kPrOptimalThreshold || !near(sel.criterion_value, kPrOptimalFMeasure, 1e-12)) {
        ok = false;
        why << "selected " << sel.optimal_threshold << "; ";
      }
    }
    out.push_back({"table7", ok, why.str()});
  }
  {
    std::ostringstream why;
    bool ok = true;
    const auto cal = calibrate(fx.probs, fx.labels, Criterion::GMean);
    check_counts(tables.table8, *cal.after_counts, why, ok);
    out.push_back({"table8", ok, why.str()});
  }
  return out;
}

}  // namespace datlime::golden

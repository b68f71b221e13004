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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "config.hpp"
#include "datlime/checkpoint.hpp"
#include "datlime/classifier.hpp"
#include "datlime/csv.hpp"
#include "datlime/error.hpp"
#include "datlime/golden.hpp"
#include "datlime/lime.hpp"
#include "datlime/metrics.hpp"
#include "datlime/network.hpp"
#include "datlime/phantom.hpp"
#include "datlime/png.hpp"
#include "datlime/rng.hpp"
#include "datlime/split.hpp"
#include "datlime/train.hpp"

namespace datlime::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Context {
  RunConfig cfg;
  fs::path run_dir;
  std::ostream& out;
};

json provenance(const RunConfig& cfg, std::string_view stage) { return json::parse(cfg.provenance_json(stage)); }

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

json counts_json(const ConfusionCounts& c) { return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}}; }

json summary_json(const MetricSummary& m) {
  json j = {{"accuracy", m.accuracy},       {"specificity", m.specificity}, {"sensitivity", m.sensitivity},
            {"precision", m.precision},     {"f1", m.f1},                   {"cohen_kappa", m.cohen_kappa}};
  json undef = json::array();
  const std::pair<MetricFlag, const char*> names[] = {{kUndefinedSpecificity, "specificity"},
                                                      {kUndefinedSensitivity, "sensitivity"},
                                                      {kUndefinedPrecision, "precision"},
                                                      {kUndefinedF1, "f1"},
                                                      {kUndefinedKappa, "cohen_kappa"}};
  for (const auto& [flag, name] : names) {
    if (m.is_undefined(flag)) undef.push_back(name);
  }
  j["undefined"] = undef;
  return j;
}

json operating_point(std::span<const double> p, std::span<const int> y, double t) {
  const auto c = confusion_at_threshold(p, y, t);
  return {{"threshold", t}, {"counts", counts_json(c)}, {"metrics", summary_json(summary_metrics(c))}};
}

fs::path image_path(const fs::path& run, const std::string& id) { return run / "images" / (id + ".svol"); }
fs::path roi_path(const fs::path& run, const std::string& id) { return run / "roi2d" / (id + ".svol"); }

std::vector<LabeledId> all_ids(const DatasetSplit& s) {
  std::vector<LabeledId> ids;
  for (auto p : {Partition::Train, Partition::Validation, Partition::Test}) {
    ids.insert(ids.end(), s.part(p).begin(), s.part(p).end());
  }
  return ids;
}

std::map<std::string, Image> load_images(const fs::path& run, std::span<const LabeledId> ids) {
  std::map<std::string, Image> out;
  for (const auto& x : ids) out.emplace(x.id, read_image(image_path(run, x.id)));
  return out;
}

// ---- stages ---------------------------------------------------------------

int cmd_gen(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto plan = plan_dataset(c.n_pd, c.n_hc, c.seed, c.dataset);
  fs::create_directories(ctx.run_dir / "volumes");
  fs::create_directories(ctx.run_dir / "roi");
  std::vector<ManifestRow> rows;
  for (const auto& e : plan) {
    const Phantom ph = generate_phantom(e.spec);
    const std::string rel = "volumes/" + e.volume_id + ".svol";
    write_volume(ctx.run_dir / rel, ph.volume);
    write_volume(ctx.run_dir / "roi" / (e.volume_id + ".svol"), ph.roi_mask);
    rows.push_back({e.volume_id, e.label, rel, e.spec.putamen_shrink, e.spec.rng_seed});
  }
  write_dataset_manifest(ctx.run_dir / "manifest.csv", rows, c.provenance_comment());
  ctx.out << "gen: " << rows.size() << " volumes (" << c.n_pd << " PD, " << c.n_hc << " HC)\n";
  return kExitOk;
}

int cmd_prep(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto rows = read_dataset_manifest(ctx.run_dir / "manifest.csv");
  fs::create_directories(ctx.run_dir / "images");
  fs::create_directories(ctx.run_dir / "roi2d");
  std::vector<LabeledId> items;
  for (const auto& r : rows) {
    const Volume vol = read_volume(ctx.run_dir / r.path);
    const auto ps = preprocess_volume(vol, c.preprocess);
    write_image(image_path(ctx.run_dir, r.volume_id), ps.image);
    const fs::path roi3d = ctx.run_dir / "roi" / (r.volume_id + ".svol");
    if (fs::exists(roi3d)) {
      write_image(roi_path(ctx.run_dir, r.volume_id), preprocess_mask(read_volume(roi3d), ps.crop_box, c.preprocess));
    }
    items.push_back({r.volume_id, r.label});
  }
  const auto split = split_dataset(items, c.ratios, derive_seed(c.seed, kSplitStream));
  write_split(ctx.run_dir / "split.csv", split, c.provenance_comment());
  ctx.out << "prep: " << items.size() << " images; split train " << split.train.size() << ", val "
          << split.validation.size() << ", test " << split.test.size() << "\n";
  return kExitOk;
}

int cmd_train(Context& ctx, const std::string& init_from) {
  const auto& c = ctx.cfg;
  const auto split = read_split(ctx.run_dir / "split.csv");
  const auto ids = all_ids(split);
  const auto images = load_images(ctx.run_dir, ids);

  const auto layers =
      c.architecture == Architecture::Transfer ? transfer_architecture(c.dropout) : compact_architecture(c.dropout);
  const InputShape shape{1, c.preprocess.output_size, c.preprocess.output_size};
  Network net(shape, layers);
  if (!init_from.empty()) {
    Network src = load_checkpoint(init_from).network;
    if (src.input_shape() != shape || src.layer_count() != layers.size()) {
      throw ValidationError("--init-from checkpoint does not match the configured architecture");
    }
    net = std::move(src);
    net.set_freeze_mask(std::vector<bool>(layers.size(), false));
  } else {
    net.init_he_uniform(derive_seed(c.seed, kInitStream));
  }
  if (c.freeze) net.set_freeze_mask(default_freeze_mask(layers));

  auto& out = ctx.out;
  const auto model = train_model(std::move(net), split, images, c.augment, c.optimizer,
                                 derive_seed(c.seed, kTrainStream), [&](const EpochStats& s) {
                                   out << "epoch " << s.epoch << ": loss " << format_double(s.train_loss) << " acc "
                                       << format_double(s.train_acc) << " val_loss " << format_double(s.val_loss)
                                       << " val_acc " << format_double(s.val_acc) << "\n";
                                 });
  save_checkpoint(ctx.run_dir / "model.ckpt", model);
  write_history_csv(ctx.run_dir / "history.csv", model.history, c.provenance_comment());
  out << "train: " << model.history.epochs.size() << " epochs, " << model.network.parameter_count()
      << " parameters\n";
  return kExitOk;
}

int cmd_predict(Context& ctx) {
  const auto model = load_checkpoint(ctx.run_dir / "model.ckpt");
  const auto split = read_split(ctx.run_dir / "split.csv");
  const auto ids = all_ids(split);
  const ModelClassifier clf(model.network);
  PredictionManifest m;
  m.source = "model.ckpt";
  std::vector<Image> batch;
  for (const auto& x : ids) batch.push_back(read_image(image_path(ctx.run_dir, x.id)));
  const auto probs = clf.predict_batch(batch);
  for (std::size_t i = 0; i < ids.size(); ++i) m.probabilities[ids[i].id] = probs[i];
  write_prediction_manifest(ctx.run_dir / "predictions.csv", m, ctx.cfg.provenance_comment());
  ctx.out << "predict: " << ids.size() << " probabilities\n";
  return kExitOk;
}

struct Labeled {
  std::vector<double> probs;
  std::vector<int> labels;
};

Labeled lookup(const ManifestClassifier& clf, std::span<const LabeledId> ids) {
  Labeled l;
  for (const auto& x : ids) {
    l.probs.push_back(clf.predict(x.id));
    l.labels.push_back(as_binary(x.label));
  }
  return l;
}

int cmd_calibrate(Context& ctx, const std::string& fixture, const std::string& predictions) {
  const auto& c = ctx.cfg;
  Labeled cal, test;
  std::string cal_name;
  if (!fixture.empty()) {
    const auto& fx = golden::calibration_fixture();
    cal = test = {fx.probs, fx.labels};
    cal_name = "fixture:" + fixture;
  } else {
    const fs::path pred = predictions.empty() ? ctx.run_dir / "predictions.csv" : fs::path(predictions);
    const ManifestClassifier clf(read_prediction_manifest(pred));
    const auto split = read_split(ctx.run_dir / "split.csv");
    cal = lookup(clf, split.part(c.calibrate_on));
    test = lookup(clf, split.part(Partition::Test));
    cal_name = std::string(to_string(c.calibrate_on));
  }

  const auto res = calibrate(cal.probs, cal.labels, c.criterion);
  fs::create_directories(ctx.run_dir);
  write_roc_csv(ctx.run_dir / "roc.csv", roc_table(cal.probs, cal.labels), c.provenance_comment());
  write_pr_csv(ctx.run_dir / "pr.csv", pr_table(cal.probs, cal.labels), c.provenance_comment());

  json j;
  j["provenance"] = provenance(c, "calibrate");
  j["calibrated_on"] = cal_name;
  j["criterion"] = to_string(res.criterion);
  j["default_threshold"] = res.default_threshold;
  j["optimal_threshold"] = res.optimal_threshold;
  j["criterion_value"] = res.criterion_value;
  j["auc"] = *res.auc;
  j["sweep"] = {{"before", {{"counts", counts_json(*res.before_counts)}, {"metrics", summary_json(*res.before)}}},
                {"after", {{"counts", counts_json(*res.after_counts)}, {"metrics", summary_json(*res.after)}}}};
  json t;
  t["n"] = test.probs.size();
  const bool both = std::count(test.labels.begin(), test.labels.end(), 1) > 0 &&
                    std::count(test.labels.begin(), test.labels.end(), 0) > 0;
  t["auc"] = both ? json(auc_trapezoid(roc_table(test.probs, test.labels))) : json(nullptr);
  if (!test.probs.empty()) {
    t["default"] = operating_point(test.probs, test.labels, res.default_threshold);
    t["optimal"] = operating_point(test.probs, test.labels, res.optimal_threshold);
  }
  j["test"] = t;
  write_json(ctx.run_dir / "calibration.json", j);

  ctx.out << "calibrate (" << cal_name << "): optimal threshold " << format_double(res.optimal_threshold) << " ("
          << to_string(res.criterion) << " " << format_double(res.criterion_value) << "), auc "
          << format_double(*res.auc) << "\n";
  return kExitOk;
}

int cmd_explain(Context& ctx, std::optional<std::size_t> count_override) {
  const auto& c = ctx.cfg;
  const auto model = load_checkpoint(ctx.run_dir / "model.ckpt");
  const auto split = read_split(ctx.run_dir / "split.csv");
  const ModelClassifier clf(model.network);
  const auto& part = split.part(c.explain_partition);
  const std::size_t n = std::min(part.size(), count_override.value_or(c.explain_count));

  fs::create_directories(ctx.run_dir / "explanations");
  fs::create_directories(ctx.run_dir / "overlays");
  std::ostringstream index;
  index << "# " << c.provenance_comment() << "\n"
        << "id,label,probability,realized_k,top_positive,roi_hit,explanation,overlay\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = part[i];
    const Image img = read_image(image_path(ctx.run_dir, x.id));
    ExplainConfig ec = c.explain;
    ec.rng_seed = derive_seed(c.explain.rng_seed, i);
    const Explanation e = explain(img, clf, ec);

    const auto top = top_positive(e.surrogate, 3);
    std::string hit = "";
    if (fs::exists(roi_path(ctx.run_dir, x.id))) {
      const Image roi = read_image(roi_path(ctx.run_dir, x.id));
      bool h = false;
      for (auto id : top) {
        for (auto p : e.map.pixels_of(id)) h = h || roi.pixels()[p] > 0.5f;
      }
      hit = h ? "1" : "0";
    }
    std::string top_s;
    for (auto id : top) top_s += (top_s.empty() ? "" : " ") + std::to_string(id);

    const std::string rel_json = "explanations/" + x.id + ".json";
    const std::string rel_png = "overlays/" + x.id + ".png";
    json j = json::parse(explanation_json(e, c.provenance_json("explain")));
    j["volume_id"] = x.id;
    j["label"] = std::string(to_string(x.label));
    j["top_positive"] = top;
    j["roi_hit"] = hit.empty() ? json(nullptr) : json(hit == "1");
    write_json(ctx.run_dir / rel_json, j);
    write_png(ctx.run_dir / rel_png, render_overlay(img, e, e.map));
    index << x.id << ',' << to_string(x.label) << ',' << format_double(e.original_prob) << ',' << e.map.k << ','
          << top_s << ',' << hit << ',' << rel_json << ',' << rel_png << "\n";
  }
  write_text_file(ctx.run_dir / "explanations.csv", index.str());
  ctx.out << "explain: " << n << " images from " << to_string(c.explain_partition) << "\n";
  return kExitOk;
}

int cmd_report(Context& ctx) {
  const auto& c = ctx.cfg;
  json r;
  r["provenance"] = provenance(c, "report");
  std::ostringstream text;
  text << "datlime run report (config_hash " << c.hash << ", seed " << c.seed << ")\n";

  const fs::path hist = ctx.run_dir / "history.csv";
  if (fs::exists(hist)) {
    const auto h = read_history_csv(hist);
    json jh = {{"epochs", h.epochs.size()}, {"history_csv", "history.csv"}};
    if (!h.epochs.empty()) {
      const auto& last = h.epochs.back();
      jh["final"] = {{"train_loss", last.train_loss},
                     {"train_acc", last.train_acc},
                     {"val_loss", last.val_loss},
                     {"val_acc", last.val_acc}};
      text << "training: " << h.epochs.size() << " epochs, final train acc " << format_double(last.train_acc)
           << ", val acc " << format_double(last.val_acc) << "\n";
    }
    r["training"] = jh;
  }

  const fs::path cal = ctx.run_dir / "calibration.json";
  if (fs::exists(cal)) {
    json jc = read_json(cal);
    jc.erase("provenance");
    text << "calibration (" << jc["calibrated_on"].get<std::string>() << ", "
         << jc["criterion"].get<std::string>() << "): optimal threshold "
         << format_double(jc["optimal_threshold"].get<double>()) << "\n";
    if (jc["test"].contains("default")) {
      const auto& d = jc["test"]["default"]["metrics"];
      const auto& o = jc["test"]["optimal"]["metrics"];
      text << "test accuracy " << format_double(d["accuracy"].get<double>()) << " -> "
           << format_double(o["accuracy"].get<double>()) << ", kappa "
           << format_double(d["cohen_kappa"].get<double>()) << " -> "
           << format_double(o["cohen_kappa"].get<double>());
      if (!jc["test"]["auc"].is_null()) text << ", auc " << format_double(jc["test"]["auc"].get<double>());
      text << "\n";
    }
    r["calibration"] = jc;
  }

  const fs::path idx = ctx.run_dir / "explanations.csv";
  if (fs::exists(idx)) {
    const CsvTable t = read_csv(idx);
    const auto c_id = t.column("id"), c_hit = t.column("roi_hit"), c_png = t.column("overlay");
    const auto c_json = t.column("explanation");
    json items = json::array();
    std::size_t hits = 0, known = 0;
    for (const auto& row : t.rows) {
      items.push_back({{"id", row[c_id]}, {"explanation", row[c_json]}, {"overlay", row[c_png]}});
      if (!row[c_hit].empty()) {
        ++known;
        hits += row[c_hit] == "1";
      }
    }
    json je = {{"count", t.rows.size()}, {"items", items}};
    je["roi_hit_rate"] = known ? json(static_cast<double>(hits) / static_cast<double>(known)) : json(nullptr);
    r["explanations"] = je;
    text << "explanations: " << t.rows.size() << " overlays";
    if (known) text << ", top-3 positive superpixels touch the striatal ROI in " << hits << "/" << known;
    text << "\n";
  }

  write_json(ctx.run_dir / "report.json", r);
  write_text_file(ctx.run_dir / "report.txt", text.str());
  ctx.out << text.str();
  return kExitOk;
}

int cmd_selftest(Context& ctx, const std::string& fixtures) {
  const auto tables = fixtures.empty() ? golden::embedded_tables() : golden::read_tables(fixtures);
  const auto results = golden::check_tables(tables);
  std::size_t ok = 0;
  for (const auto& r : results) {
    ctx.out << r.table << ": " << (r.matched ? "matched" : "MISMATCH " + r.detail) << "\n";
    ok += r.matched;
  }
  ctx.out << "tables: " << ok << "/" << results.size() << " matched\n";
  return ok == results.size() ? kExitOk : kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explainable DaTscan-style diagnosis pipeline on synthetic phantoms", "datlime"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path, run_dir = "run", criterion, calibrate_on;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool exhaustive = false;
  app.add_option("--config", config_path, "INI settings file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--run-dir", run_dir, "Directory holding every stage artifact");
  app.add_option("--set", sets, "Override a setting, section.key=value (repeatable)");
  app.add_option("--threshold-criterion", criterion, "Calibration criterion")
      ->check(CLI::IsMember({"gmean", "fmeasure"}));
  app.add_option("--calibrate-on", calibrate_on, "Partition swept for the threshold")
      ->check(CLI::IsMember({"val", "test"}));
  app.add_flag("--exhaustive-lime", exhaustive, "Enumerate all 2^k LIME masks (k <= 16)");

  std::optional<std::size_t> n_pd, n_hc, epochs, count;
  std::string init_from, fixture, predictions, fixtures, architecture;
  auto* gen = app.add_subcommand("gen", "Generate phantom volumes and the dataset manifest");
  gen->add_option("--n-pd", n_pd, "PD phantom count");
  gen->add_option("--n-hc", n_hc, "HC phantom count");
  app.add_subcommand("prep", "Slice, crop, resize, normalize and split");
  auto* train = app.add_subcommand("train", "Train the CNN and write model.ckpt and history.csv");
  train->add_option("--epochs", epochs, "Epoch count");
  train->add_option("--architecture", architecture)->check(CLI::IsMember({"compact", "transfer"}));
  train->add_option("--init-from", init_from, "Start from an existing checkpoint")->check(CLI::ExistingFile);
  app.add_subcommand("predict", "Score every split image into predictions.csv");
  auto* cal = app.add_subcommand("calibrate", "ROC/PR sweep and optimal threshold");
  cal->add_option("--fixture", fixture, "Calibrate the embedded reference probabilities")
      ->check(CLI::IsMember({"table6"}));
  cal->add_option("--predictions", predictions, "External id,probability manifest")->check(CLI::ExistingFile);
  auto* expl = app.add_subcommand("explain", "LIME explanations and overlays");
  expl->add_option("--count", count, "Number of images to explain");
  app.add_subcommand("report", "Aggregate artifacts into report.json and report.txt");
  auto* self = app.add_subcommand("selftest", "Check the golden metric tables");
  self->add_option("--fixtures", fixtures, "Directory with table5.csv ... table8.csv")->check(CLI::ExistingDirectory);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const bool uses_run_dir = name != "selftest";
    const fs::path saved = fs::path(run_dir) / "settings.ini";
    Settings s;
    if (uses_run_dir && fs::exists(saved)) s.merge_ini_file(saved);
    if (!config_path.empty()) s.merge_ini_file(config_path);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects section.key=value, got '" + kv + "'");
      s.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) s.set("run.seed", std::to_string(*seed));
    if (!criterion.empty()) s.set("calibrate.criterion", criterion);
    if (!calibrate_on.empty()) s.set("calibrate.on", calibrate_on);
    if (exhaustive) s.set("explain.exhaustive", "true");
    if (n_pd) s.set("gen.n_pd", std::to_string(*n_pd));
    if (n_hc) s.set("gen.n_hc", std::to_string(*n_hc));
    if (epochs) s.set("train.epochs", std::to_string(*epochs));
    if (!architecture.empty()) s.set("train.architecture", architecture);

    Context ctx{resolve(s), fs::path(run_dir), out};
    if (uses_run_dir) {
      fs::create_directories(run_dir);
      write_text_file(saved, "# " + ctx.cfg.provenance_comment() + "\n" + s.to_ini());
    }
    if (name == "gen") return cmd_gen(ctx);
    if (name == "prep") return cmd_prep(ctx);
    if (name == "train") return cmd_train(ctx, init_from);
    if (name == "predict") return cmd_predict(ctx);
    if (name == "calibrate") return cmd_calibrate(ctx, fixture, predictions);
    if (name == "explain") return cmd_explain(ctx, count);
    if (name == "report") return cmd_report(ctx);
    return cmd_selftest(ctx, fixtures);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace datlime::cli

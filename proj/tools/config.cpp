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

#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "datlime/csv.hpp"
#include "datlime/error.hpp"
#include "datlime/rng.hpp"

namespace datlime::cli {

namespace {

enum class Kind { UInt, Double, Bool, Choice };

struct KeyDef {
  const char* key;
  Kind kind;
  const char* def;
  const char* choices = "";  // '|' separated for Choice
};

// clang-format off
constexpr KeyDef kKeys[] = {
    {"run.seed", Kind::UInt, "7"},
    {"gen.n_pd", Kind::UInt, "430"},
    {"gen.n_hc", Kind::UInt, "212"},
    {"gen.pd_shrink_low", Kind::Double, "0.3"},
    {"gen.pd_shrink_high", Kind::Double, "0.7"},
    {"gen.pd_intensity_low", Kind::Double, "0.55"},
    {"gen.pd_intensity_high", Kind::Double, "0.85"},
    {"gen.hc_intensity_low", Kind::Double, "0.9"},
    {"gen.hc_intensity_high", Kind::Double, "1"},
    {"gen.center_jitter", Kind::Double, "2"},
    {"gen.noise_sigma", Kind::Double, "0.02"},
    {"prep.slice_index", Kind::UInt, "41"},
    {"prep.crop_threshold", Kind::Double, "0.02"},
    {"prep.output_size", Kind::UInt, "64"},
    {"prep.train_ratio", Kind::Double, "0.8"},
    {"prep.val_ratio", Kind::Double, "0.1"},
    {"prep.test_ratio", Kind::Double, "0.1"},
    {"train.architecture", Kind::Choice, "compact", "compact|transfer"},
    {"train.dropout", Kind::Double, "0.5"},
    {"train.freeze", Kind::Bool, "false"},
    {"train.epochs", Kind::UInt, "10"},
    {"train.learning_rate", Kind::Double, "0.001"},
    {"train.beta1", Kind::Double, "0.9"},
    {"train.beta2", Kind::Double, "0.999"},
    {"train.epsilon", Kind::Double, "1e-08"},
    {"train.batch_size_train", Kind::UInt, "32"},
    {"train.batch_size_val", Kind::UInt, "16"},
    {"train.steps_train", Kind::UInt, "32"},
    {"train.steps_val", Kind::UInt, "4"},
    {"train.aug_max_shift", Kind::Double, "0.1"},
    {"train.aug_hflip_prob", Kind::Double, "0.5"},
    {"train.aug_brightness_low", Kind::Double, "0.8"},
    {"train.aug_brightness_high", Kind::Double, "1.2"},
    {"calibrate.criterion", Kind::Choice, "gmean", "gmean|fmeasure"},
    {"calibrate.on", Kind::Choice, "val", "val|test"},
    {"explain.count", Kind::UInt, "4"},
    {"explain.partition", Kind::Choice, "test", "train|val|test"},
    {"explain.target_k", Kind::UInt, "40"},
    {"explain.compactness", Kind::Double, "10"},
    {"explain.n_samples", Kind::UInt, "1000"},
    {"explain.p_off", Kind::Double, "0.5"},
    {"explain.ridge_lambda", Kind::Double, "1"},
    {"explain.kernel_width", Kind::Double, "0.25"},
    {"explain.top_k", Kind::UInt, "5"},
    {"explain.replacement_value", Kind::Double, "0"},
    {"explain.exhaustive", Kind::Bool, "false"},
};
// clang-format on

const KeyDef* find_def(std::string_view key) {
  for (const auto& d : kKeys) {
    if (key == d.key) return &d;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string canonical_value(const KeyDef& d, std::string_view raw) {
  const std::string v = trim(raw);
  try {
    switch (d.kind) {
      case Kind::UInt:
        return std::to_string(parse_uint(v));
      case Kind::Double:
        return format_double(parse_double(v));
      case Kind::Bool:
        if (v == "true" || v == "1" || v == "yes" || v == "on") return "true";
        if (v == "false" || v == "0" || v == "no" || v == "off") return "false";
        break;
      case Kind::Choice: {
        std::string_view rest = d.choices;
        while (!rest.empty()) {
          const auto bar = rest.find('|');
          if (rest.substr(0, bar) == v) return v;
          rest = bar == std::string_view::npos ? std::string_view{} : rest.substr(bar + 1);
        }
        break;
      }
    }
  } catch (const ValidationError&) {
  }
  throw ValidationError("invalid value '" + v + "' for " + d.key);
}

}  // namespace

Settings::Settings() {
  for (const auto& d : kKeys) values_[d.key] = d.def;
}

void Settings::set(std::string_view key, std::string_view value) {
  const KeyDef* d = find_def(key);
  if (!d) throw ValidationError("unknown setting '" + std::string(key) + "'");
  values_[d->key] = canonical_value(*d, value);
}

const std::string& Settings::get(std::string_view key) const {
  const auto it = values_.find(std::string(key));
  if (it == values_.end()) throw ValidationError("unknown setting '" + std::string(key) + "'");
  return it->second;
}

void Settings::merge_ini(std::string_view text, std::string_view source) {
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    if (s.front() == '[') {
      if (s.back() != ']') throw ValidationError(where + ": malformed section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string full = key.find('.') == std::string::npos && !section.empty() ? section + "." + key : key;
    try {
      set(full, std::string_view(s).substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
}

void Settings::merge_ini_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  merge_ini(buf.str(), path.string());
}

std::string Settings::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string Settings::to_ini() const {
  std::string out, section;
  for (const auto& [k, v] : values_) {
    const auto dot = k.find('.');
    if (k.substr(0, dot) != section) {
      section = k.substr(0, dot);
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += k.substr(dot + 1) + " = " + v + "\n";
  }
  return out;
}

std::string config_hash(const Settings& settings) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : settings.canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::provenance_comment() const {
  return "config_hash=" + hash + " seed=" + std::to_string(seed);
}

std::string RunConfig::provenance_json(std::string_view stage) const {
  return "{\"config_hash\": \"" + hash + "\", \"seed\": " + std::to_string(seed) + ", \"stage\": \"" +
         std::string(stage) + "\"}";
}

RunConfig resolve(const Settings& s) {
  auto u = [&](const char* k) { return static_cast<std::size_t>(parse_uint(s.get(k))); };
  auto d = [&](const char* k) { return parse_double(s.get(k)); };
  auto b = [&](const char* k) { return s.get(k) == "true"; };

  RunConfig c;
  c.seed = parse_uint(s.get("run.seed"));
  c.hash = config_hash(s);

  c.n_pd = u("gen.n_pd");
  c.n_hc = u("gen.n_hc");
  c.dataset.pd_shrink_low = d("gen.pd_shrink_low");
  c.dataset.pd_shrink_high = d("gen.pd_shrink_high");
  c.dataset.pd_intensity_low = d("gen.pd_intensity_low");
  c.dataset.pd_intensity_high = d("gen.pd_intensity_high");
  c.dataset.hc_intensity_low = d("gen.hc_intensity_low");
  c.dataset.hc_intensity_high = d("gen.hc_intensity_high");
  c.dataset.center_jitter = d("gen.center_jitter");
  c.dataset.noise_sigma = d("gen.noise_sigma");

  c.preprocess.slice_index = u("prep.slice_index");
  c.preprocess.crop_threshold = d("prep.crop_threshold");
  c.preprocess.output_size = u("prep.output_size");
  c.ratios = {d("prep.train_ratio"), d("prep.val_ratio"), d("prep.test_ratio")};
  if (std::fabs(c.ratios.train + c.ratios.validation + c.ratios.test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }

  c.architecture = s.get("train.architecture") == "transfer" ? Architecture::Transfer : Architecture::Compact;
  c.dropout = static_cast<float>(d("train.dropout"));
  if (!(c.dropout >= 0.0f && c.dropout < 1.0f)) throw ValidationError("train.dropout must lie in [0, 1)");
  c.freeze = b("train.freeze");
  c.optimizer.epochs = u("train.epochs");
  c.optimizer.learning_rate = d("train.learning_rate");
  c.optimizer.beta1 = d("train.beta1");
  c.optimizer.beta2 = d("train.beta2");
  c.optimizer.epsilon = d("train.epsilon");
  c.optimizer.batch_size_train = u("train.batch_size_train");
  c.optimizer.batch_size_val = u("train.batch_size_val");
  c.optimizer.steps_train = u("train.steps_train");
  c.optimizer.steps_val = u("train.steps_val");
  c.optimizer.validate();
  c.augment = {d("train.aug_max_shift"), d("train.aug_hflip_prob"), d("train.aug_brightness_low"),
               d("train.aug_brightness_high"), derive_seed(c.seed, kAugmentStream)};
  c.augment.validate();

  c.criterion = parse_criterion(s.get("calibrate.criterion"));
  c.calibrate_on = parse_partition(s.get("calibrate.on"));

  c.explain_count = u("explain.count");
  c.explain_partition = parse_partition(s.get("explain.partition"));
  auto& e = c.explain;
  e.target_k_superpixels = u("explain.target_k");
  e.compactness = d("explain.compactness");
  e.n_samples = u("explain.n_samples");
  e.p_off = d("explain.p_off");
  e.ridge_lambda = d("explain.ridge_lambda");
  e.kernel_width = d("explain.kernel_width");
  e.top_k_display = u("explain.top_k");
  e.replacement_value = static_cast<float>(d("explain.replacement_value"));
  e.exhaustive = b("explain.exhaustive");
  e.rng_seed = derive_seed(c.seed, kExplainStream);
  e.validate();
  return c;
}

}  // namespace datlime::cli

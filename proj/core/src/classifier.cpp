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

#include "datlime/classifier.hpp"

#include <cmath>
#include <sstream>

#include "datlime/csv.hpp"
#include "datlime/error.hpp"

namespace datlime {

namespace {

double checked_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw RangeError("classifier returned probability outside [0, 1]");
  return p;
}

}  // namespace

std::vector<double> BlackBoxClassifier::predict_batch(std::span<const Image> images) const {
  std::vector<double> out;
  out.reserve(images.size());
  for (const auto& im : images) out.push_back(predict(im));
  return out;
}

ModelClassifier::ModelClassifier(Network network, std::size_t batch_size)
    : network_(std::move(network)), batch_size_(batch_size == 0 ? 1 : batch_size) {}

std::optional<std::pair<std::size_t, std::size_t>> ModelClassifier::input_dims() const {
  return std::make_pair(network_.input_shape().width, network_.input_shape().height);
}

void ModelClassifier::check_dims(const Image& image) const {
  if (image.width() != network_.input_shape().width || image.height() != network_.input_shape().height) {
    throw ShapeError("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                     ", classifier expects " + std::to_string(network_.input_shape().width) + "x" +
                     std::to_string(network_.input_shape().height));
  }
}

double ModelClassifier::predict(const Image& image) const {
  return predict_batch(std::span<const Image>(&image, 1)).front();
}

std::vector<double> ModelClassifier::predict_batch(std::span<const Image> images) const {
  for (const auto& im : images) check_dims(im);
  const auto probs = predict_probabilities(network_, images, batch_size_);
  std::vector<double> out;
  out.reserve(probs.size());
  for (float p : probs) out.push_back(checked_probability(p));
  return out;
}

double FunctionClassifier::predict(const Image& image) const { return checked_probability(fn_(image)); }

void PredictionManifest::validate() const {
  for (const auto& [id, p] : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw RangeError("probability for '" + id + "' outside [0, 1]");
  }
}

PredictionManifest read_prediction_manifest(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_id = t.column("id"), c_p = t.column("probability");
  PredictionManifest m;
  m.source = path.string();
  for (const auto& r : t.rows) {
    if (!m.probabilities.emplace(r[c_id], parse_double(r[c_p])).second) {
      throw ValidationError("duplicate id '" + r[c_id] + "' in " + path.string());
    }
  }
  m.validate();
  return m;
}

void write_prediction_manifest(const std::filesystem::path& path, const PredictionManifest& manifest,
                               std::string_view comment) {
  manifest.validate();
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "id,probability\n";
  for (const auto& [id, p] : manifest.probabilities) out << id << ',' << format_double(p) << '\n';
  write_text_file(path, out.str());
}

ManifestClassifier::ManifestClassifier(PredictionManifest manifest) : manifest_(std::move(manifest)) {
  manifest_.validate();
}

double ManifestClassifier::predict(std::string_view id) const {
  const auto it = manifest_.probabilities.find(std::string(id));
  if (it == manifest_.probabilities.end()) throw MissingIdError("no prediction recorded for id '" + std::string(id) + "'");
  return it->second;
}

std::vector<double> ManifestClassifier::predict_batch(std::span<const std::string> ids) const {
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(predict(id));
  return out;
}

ManifestClassifier manifest_classifier(PredictionManifest manifest) { return ManifestClassifier(std::move(manifest)); }

}  // namespace datlime

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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datlime/imaging.hpp"
#include "datlime/train.hpp"

namespace datlime {

/// Image -> P(PD) contract consumed by metrics and the explainer.
/// Implementations must be deterministic and return values in [0, 1].
class BlackBoxClassifier {
 public:
  virtual ~BlackBoxClassifier() = default;

  virtual double predict(const Image& image) const = 0;

  /// One probability per image, in input order. The default maps predict.
  virtual std::vector<double> predict_batch(std::span<const Image> images) const;

  /// Expected input dimensions, when the classifier has any.
  virtual std::optional<std::pair<std::size_t, std::size_t>> input_dims() const { return std::nullopt; }
};

/// Eval-mode wrapper around a trained network.
class ModelClassifier final : public BlackBoxClassifier {
 public:
  explicit ModelClassifier(Network network, std::size_t batch_size = 64);

  double predict(const Image& image) const override;
  std::vector<double> predict_batch(std::span<const Image> images) const override;
  std::optional<std::pair<std::size_t, std::size_t>> input_dims() const override;

  const Network& network() const { return network_; }

 private:
  void check_dims(const Image& image) const;

  Network network_;
  std::size_t batch_size_;
};

/// Adapts any callable; probabilities outside [0, 1] raise RangeError.
class FunctionClassifier final : public BlackBoxClassifier {
 public:
  explicit FunctionClassifier(std::function<double(const Image&)> fn) : fn_(std::move(fn)) {}
  double predict(const Image& image) const override;

 private:
  std::function<double(const Image&)> fn_;
};

/// Recorded probabilities keyed by volume id.
struct PredictionManifest {
  std::map<std::string, double> probabilities;
  std::string source;

  /// Throws RangeError for values outside [0, 1].
  void validate() const;
};

/// CSV `id,probability` with a header row; duplicate ids and out-of-range
/// probabilities are rejected.
PredictionManifest read_prediction_manifest(const std::filesystem::path& path);
void write_prediction_manifest(const std::filesystem::path& path, const PredictionManifest& manifest,
                               std::string_view comment = {});

/// Lookup-backed classifier: the batched probability contract keyed by id
/// rather than by pixels.
class ManifestClassifier {
 public:
  explicit ManifestClassifier(PredictionManifest manifest);

  /// Throws MissingIdError for unknown ids.
  double predict(std::string_view id) const;
  std::vector<double> predict_batch(std::span<const std::string> ids) const;

  const PredictionManifest& manifest() const { return manifest_; }

 private:
  PredictionManifest manifest_;
};

ManifestClassifier manifest_classifier(PredictionManifest manifest);

}  // namespace datlime

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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datlime/imaging.hpp"
#include "datlime/network.hpp"
#include "datlime/optim.hpp"
#include "datlime/split.hpp"

namespace datlime {

struct EpochStats {
  std::size_t epoch = 0;  ///< 1-based
  double train_loss = 0, train_acc = 0, val_loss = 0, val_acc = 0;
  bool operator==(const EpochStats&) const = default;
};

struct TrainingHistory {
  std::vector<EpochStats> epochs;
  bool operator==(const TrainingHistory&) const = default;
};

struct LabeledImages {
  std::vector<Image> images;
  std::vector<float> labels;  ///< 1 = PD
  std::size_t size() const { return images.size(); }
};

struct TrainedModel {
  Network network;
  OptimizerConfig config;
  std::uint64_t seed = 0;
  TrainingHistory history;
};

/// Stacks single-channel images into a [N, 1, H, W] batch.
Tensor to_batch(std::span<const Image> images);

/// Eval-mode P(PD) for each image, processed in chunks of batch_size.
std::vector<float> predict_probabilities(const Network& net, std::span<const Image> images, std::size_t batch_size = 64);

using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch training with on-the-fly augmentation. Each epoch runs
/// steps_train batches drawn from a seeded reshuffling stream of the
/// training set, then steps_val eval-mode batches cycling through the
/// validation set. Frozen layers are never touched.
TrainingHistory train(Network& net, const LabeledImages& train_set, const LabeledImages& val_set,
                      const AugmentSpec& aug, const OptimizerConfig& config, std::uint64_t seed,
                      const EpochCallback& on_epoch = {});

/// Convenience wrapper resolving split ids against preprocessed images.
TrainedModel train_model(Network net, const DatasetSplit& split, const std::map<std::string, Image>& images,
                         const AugmentSpec& aug, const OptimizerConfig& config, std::uint64_t seed,
                         const EpochCallback& on_epoch = {});

LabeledImages gather(std::span<const LabeledId> ids, const std::map<std::string, Image>& images);

/// CSV `epoch,train_loss,train_acc,val_loss,val_acc`.
void write_history_csv(const std::filesystem::path& path, const TrainingHistory& history,
                       std::string_view comment = {});
TrainingHistory read_history_csv(const std::filesystem::path& path);

}  // namespace datlime

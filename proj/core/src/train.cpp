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

#include "datlime/train.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "datlime/csv.hpp"
#include "datlime/error.hpp"
#include "datlime/rng.hpp"

namespace datlime {

namespace {

// Endless sequence of training indices: a fresh seeded permutation every
// time the previous one is exhausted.
class IndexStream {
 public:
  IndexStream(std::size_t n, std::uint64_t seed) : order_(n), seed_(seed) { refill(); }

  std::size_t next() {
    if (pos_ == order_.size()) refill();
    return order_[pos_++];
  }

 private:
  void refill() {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng(derive_seed(seed_, round_++));
    for (std::size_t i = order_.size(); i-- > 1;) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
      std::swap(order_[i], order_[std::min(j, i)]);
    }
    pos_ = 0;
  }

  std::vector<std::size_t> order_;
  std::uint64_t seed_;
  std::uint64_t round_ = 0;
  std::size_t pos_ = 0;
};

void check_inputs(const Network& net, const LabeledImages& set, const char* name) {
  if (set.images.size() != set.labels.size()) throw ShapeError(std::string(name) + ": image/label count mismatch");
  for (const auto& im : set.images) {
    if (im.width() != net.input_shape().width || im.height() != net.input_shape().height) {
      throw ShapeError(std::string(name) + ": image dims do not match the network input");
    }
  }
}

double accuracy_at_half(std::span<const float> probs, std::span<const float> labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) correct += ((probs[i] >= 0.5f ? 1.0f : 0.0f) == labels[i]);
  return static_cast<double>(correct);
}

}  // namespace

Tensor to_batch(std::span<const Image> images) {
  if (images.empty()) return Tensor({0, 1, 0, 0});
  const std::size_t w = images.front().width(), h = images.front().height();
  Tensor batch({images.size(), 1, h, w});
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (images[n].width() != w || images[n].height() != h) throw ShapeError("batch images differ in size");
    std::copy(images[n].pixels().begin(), images[n].pixels().end(), batch.sample(n).begin());
  }
  return batch;
}

std::vector<float> predict_probabilities(const Network& net, std::span<const Image> images, std::size_t batch_size) {
  std::vector<float> out;
  out.reserve(images.size());
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    const auto chunk = images.subspan(start, std::min(batch_size, images.size() - start));
    const Tensor probs = forward(net, to_batch(chunk), false);
    if (probs.stride() != 1) throw ShapeError("network must emit one probability per sample");
    out.insert(out.end(), probs.values.begin(), probs.values.end());
  }
  return out;
}

TrainingHistory train(Network& net, const LabeledImages& train_set, const LabeledImages& val_set,
                      const AugmentSpec& aug, const OptimizerConfig& config, std::uint64_t seed,
                      const EpochCallback& on_epoch) {
  config.validate();
  aug.validate();
  if (train_set.size() == 0) throw ValidationError("training partition is empty");
  if (val_set.size() == 0) throw ValidationError("validation partition is empty");
  check_inputs(net, train_set, "train");
  check_inputs(net, val_set, "validation");

  TrainingHistory history;
  AdamState state;
  IndexStream stream(train_set.size(), derive_seed(seed, 1));
  std::uint64_t draw = 0;
  std::size_t val_cursor = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0, correct = 0;
    std::size_t seen = 0;
    for (std::size_t step = 0; step < config.steps_train; ++step) {
      std::vector<Image> batch;
      std::vector<float> labels;
      for (std::size_t b = 0; b < config.batch_size_train; ++b) {
        const std::size_t idx = stream.next();
        batch.push_back(augment(train_set.images[idx], aug, draw++));
        labels.push_back(train_set.labels[idx]);
      }
      const auto trace = forward_trace(net, to_batch(batch), true, derive_seed(seed, 2, state.step));
      const std::span<const float> probs = trace.output().values;
      loss_sum += bce_loss<float>(probs, labels) * static_cast<double>(labels.size());
      correct += accuracy_at_half(probs, labels);
      seen += labels.size();
      const auto grads = backward<float>(net, trace, labels);
      adam_step(net, grads, state, config);
    }
    if (seen > 0) {
      stats.train_loss = loss_sum / static_cast<double>(seen);
      stats.train_acc = correct / static_cast<double>(seen);
    }

    loss_sum = correct = 0;
    seen = 0;
    for (std::size_t step = 0; step < config.steps_val; ++step) {
      std::vector<Image> batch;
      std::vector<float> labels;
      for (std::size_t b = 0; b < config.batch_size_val; ++b) {
        batch.push_back(val_set.images[val_cursor]);
        labels.push_back(val_set.labels[val_cursor]);
        val_cursor = (val_cursor + 1) % val_set.size();
      }
      const Tensor probs = forward(net, to_batch(batch), false);
      loss_sum += bce_loss<float>(probs.values, labels) * static_cast<double>(labels.size());
      correct += accuracy_at_half(probs.values, labels);
      seen += labels.size();
    }
    if (seen > 0) {
      stats.val_loss = loss_sum / static_cast<double>(seen);
      stats.val_acc = correct / static_cast<double>(seen);
    }
    history.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return history;
}

LabeledImages gather(std::span<const LabeledId> ids, const std::map<std::string, Image>& images) {
  LabeledImages out;
  for (const auto& item : ids) {
    const auto it = images.find(item.id);
    if (it == images.end()) throw MissingIdError("no image for id '" + item.id + "'");
    out.images.push_back(it->second);
    out.labels.push_back(static_cast<float>(as_binary(item.label)));
  }
  return out;
}

TrainedModel train_model(Network net, const DatasetSplit& split, const std::map<std::string, Image>& images,
                         const AugmentSpec& aug, const OptimizerConfig& config, std::uint64_t seed,
                         const EpochCallback& on_epoch) {
  TrainedModel model;
  model.config = config;
  model.seed = seed;
  model.history = train(net, gather(split.train, images), gather(split.validation, images), aug, config, seed, on_epoch);
  model.network = std::move(net);
  return model;
}

void write_history_csv(const std::filesystem::path& path, const TrainingHistory& history, std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& e : history.epochs) {
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.train_acc) << ','
        << format_double(e.val_loss) << ',' << format_double(e.val_acc) << '\n';
  }
  write_text_file(path, out.str());
}

TrainingHistory read_history_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t ce = t.column("epoch"), ctl = t.column("train_loss"), cta = t.column("train_acc"),
                    cvl = t.column("val_loss"), cva = t.column("val_acc");
  TrainingHistory h;
  for (const auto& r : t.rows) {
    h.epochs.push_back({static_cast<std::size_t>(parse_uint(r[ce])), parse_double(r[ctl]), parse_double(r[cta]),
                        parse_double(r[cvl]), parse_double(r[cva])});
  }
  return h;
}

}  // namespace datlime

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

#include <gtest/gtest.h>

#include <zlib.h>

#include <filesystem>

#include "datlime/checkpoint.hpp"
#include "datlime/error.hpp"
#include "datlime/phantom.hpp"
#include "datlime/train.hpp"

namespace datlime {
namespace {

// Ten PD and ten HC phantom slices at 32x32.
const LabeledImages& phantom_images() {
  static const LabeledImages set = [] {
    LabeledImages out;
    PreprocessConfig prep;
    prep.output_size = 32;
    for (const auto& e : generate_dataset(10, 10, 21).entries) {
      out.images.push_back(preprocess_volume(e.volume, prep).image);
      out.labels.push_back(static_cast<float>(as_binary(e.label)));
    }
    return out;
  }();
  return set;
}

OptimizerConfig quick_config(std::size_t epochs) {
  OptimizerConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size_train = 10;
  cfg.batch_size_val = 10;
  cfg.steps_train = 6;
  cfg.steps_val = 2;
  return cfg;
}

Network fresh_net() {
  Network net(InputShape{1, 32, 32}, compact_architecture());
  net.init_he_uniform(5);
  return net;
}

TEST(Train, LossDecreasesOnSeparableSlices) {
  auto net = fresh_net();
  const auto h = train(net, phantom_images(), phantom_images(), AugmentSpec::identity(), quick_config(2), 3);
  ASSERT_EQ(h.epochs.size(), 2u);
  EXPECT_EQ(h.epochs[0].epoch, 1u);
  EXPECT_LT(h.epochs[1].train_loss, h.epochs[0].train_loss);
}

TEST(Train, AllFrozenKeepsParamsBitEqual) {
  auto net = fresh_net();
  net.set_freeze_mask(std::vector<bool>(net.layer_count(), true));
  const auto before = net;
  train(net, phantom_images(), phantom_images(), AugmentSpec{}, quick_config(1), 3);
  EXPECT_EQ(net, before);
}

TEST(Train, SameSeedSameHistory) {
  auto a = fresh_net();
  auto b = fresh_net();
  std::vector<EpochStats> seen;
  const auto ha = train(a, phantom_images(), phantom_images(), AugmentSpec{}, quick_config(2), 9,
                        [&](const EpochStats& s) { seen.push_back(s); });
  const auto hb = train(b, phantom_images(), phantom_images(), AugmentSpec{}, quick_config(2), 9);
  EXPECT_EQ(ha, hb);
  EXPECT_EQ(a, b);
  EXPECT_EQ(seen, ha.epochs);
}

TEST(Train, RejectsMismatchedInputs) {
  auto net = fresh_net();
  LabeledImages wrong;
  wrong.images.push_back(Image(16, 16));
  wrong.labels.push_back(1.0f);
  EXPECT_THROW(train(net, wrong, phantom_images(), AugmentSpec{}, quick_config(1), 1), ShapeError);
  EXPECT_THROW(train(net, LabeledImages{}, phantom_images(), AugmentSpec{}, quick_config(1), 1), ValidationError);
}

TEST(Train, HistoryCsvRoundTrip) {
  TrainingHistory h;
  h.epochs.push_back({1, 0.69, 0.5, 0.68, 0.55});
  h.epochs.push_back({2, 0.41, 0.8125, 0.3, 0.9});
  const auto path = std::filesystem::temp_directory_path() / "datlime_history.csv";
  write_history_csv(path, h, "seed=1");
  EXPECT_EQ(read_history_csv(path), h);
}

TrainedModel sample_model() {
  TrainedModel m;
  m.network = fresh_net();
  m.network.set_freeze_mask(default_freeze_mask(m.network.layers()));
  m.config = quick_config(3);
  m.seed = 77;
  m.history.epochs.push_back({1, 0.5, 0.75, 0.4, 0.8});
  return m;
}

TEST(Checkpoint, RoundTripPreservesPredictions) {
  const auto m = sample_model();
  const auto path = std::filesystem::temp_directory_path() / "datlime_model.ckpt";
  save_checkpoint(path, m);
  const auto back = load_checkpoint(path);
  EXPECT_EQ(back.network, m.network);
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.network.freeze_mask(), m.network.freeze_mask());
  const auto& imgs = phantom_images().images;
  EXPECT_EQ(predict_probabilities(back.network, imgs), predict_probabilities(m.network, imgs));
}

TEST(Checkpoint, CorruptedByteFailsChecksum) {
  auto bytes = encode_checkpoint(sample_model());
  bytes[bytes.size() / 2] ^= 0x10;
  EXPECT_THROW(decode_checkpoint(bytes), ChecksumError);
}

TEST(Checkpoint, UnknownVersionRejected) {
  auto bytes = encode_checkpoint(sample_model());
  bytes[5] = 9;  // version field follows the 5-byte magic
  const uLong crc = crc32(0L, bytes.data(), static_cast<uInt>(bytes.size() - 4));
  for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = static_cast<std::uint8_t>(crc >> (8 * i));
  EXPECT_THROW(decode_checkpoint(bytes), VersionError);
}

TEST(Checkpoint, TruncationAndBadMagic) {
  auto bytes = encode_checkpoint(sample_model());
  EXPECT_THROW(decode_checkpoint(std::span(bytes).first(3)), FormatError);
  bytes[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bytes), FormatError);
}

}  // namespace
}  // namespace datlime

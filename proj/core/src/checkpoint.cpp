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

#include "datlime/checkpoint.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <iterator>
#include <string>

#include "datlime/error.hpp"

namespace datlime {

namespace {

constexpr std::array<char, 5> kMagic = {'S', 'N', 'E', 'T', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void floats(const std::vector<float>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (float x : v) f32(x);
  }

  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(s[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(s[i]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<float> floats() {
    const std::uint32_t n = u32();
    if (n > remaining() / 4) throw FormatError("checkpoint truncated");
    std::vector<float> v(n);
    for (float& x : v) x = f32();
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) throw FormatError("checkpoint truncated");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc(std::span<const std::uint8_t> b) {
  return static_cast<std::uint32_t>(crc32(0L, b.data(), static_cast<uInt>(b.size())));
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const TrainedModel& model) {
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kCheckpointVersion);
  const Network& net = model.network;
  w.u32(static_cast<std::uint32_t>(net.input_shape().channels));
  w.u32(static_cast<std::uint32_t>(net.input_shape().height));
  w.u32(static_cast<std::uint32_t>(net.input_shape().width));
  const OptimizerConfig& c = model.config;
  w.f64(c.learning_rate);
  w.f64(c.beta1);
  w.f64(c.beta2);
  w.f64(c.epsilon);
  w.u32(static_cast<std::uint32_t>(c.epochs));
  w.u32(static_cast<std::uint32_t>(c.batch_size_train));
  w.u32(static_cast<std::uint32_t>(c.batch_size_val));
  w.u32(static_cast<std::uint32_t>(c.steps_train));
  w.u32(static_cast<std::uint32_t>(c.steps_val));
  w.u64(model.seed);
  w.u32(static_cast<std::uint32_t>(net.layer_count()));
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    const LayerSpec& L = net.layers()[i];
    w.u8(static_cast<std::uint8_t>(L.kind));
    w.u8(static_cast<std::uint8_t>(L.activation));
    w.u8(L.trainable ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(L.units));
    w.u32(static_cast<std::uint32_t>(L.kernel));
    w.u32(static_cast<std::uint32_t>(L.stride));
    w.u32(static_cast<std::uint32_t>(L.pad));
    w.f32(L.rate);
    w.floats(net.params(i).weights);
    w.floats(net.params(i).bias);
  }
  w.u32(crc(w.bytes));
  return std::move(w.bytes);
}

TrainedModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() + 8 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  if (crc(body) != tail.u32()) throw ChecksumError("checkpoint checksum mismatch");

  Reader r(body.subspan(kMagic.size()));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  }
  InputShape input;
  input.channels = r.u32();
  input.height = r.u32();
  input.width = r.u32();
  TrainedModel model;
  OptimizerConfig& c = model.config;
  c.learning_rate = r.f64();
  c.beta1 = r.f64();
  c.beta2 = r.f64();
  c.epsilon = r.f64();
  c.epochs = r.u32();
  c.batch_size_train = r.u32();
  c.batch_size_val = r.u32();
  c.steps_train = r.u32();
  c.steps_val = r.u32();
  model.seed = r.u64();
  const std::uint32_t n_layers = r.u32();
  std::vector<LayerSpec> layers;
  std::vector<LayerParams<float>> params;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    LayerSpec L;
    L.kind = static_cast<LayerKind>(r.u8());
    L.activation = static_cast<ActivationKind>(r.u8());
    L.trainable = r.u8() != 0;
    L.units = r.u32();
    L.kernel = r.u32();
    L.stride = r.u32();
    L.pad = r.u32();
    L.rate = r.f32();
    if (static_cast<int>(L.kind) > 4 || static_cast<int>(L.activation) > 2) throw FormatError("unknown layer kind");
    layers.push_back(L);
    LayerParams<float> p;
    p.weights = r.floats();
    p.bias = r.floats();
    params.push_back(std::move(p));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in checkpoint");

  model.network = Network(input, std::move(layers));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& dst = model.network.params(i);
    if (dst.weights.size() != params[i].weights.size() || dst.bias.size() != params[i].bias.size()) {
      throw FormatError("checkpoint parameter blob does not match layer " + std::to_string(i));
    }
    dst = std::move(params[i]);
  }
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model) {
  const auto bytes = encode_checkpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_checkpoint(bytes);
}

}  // namespace datlime

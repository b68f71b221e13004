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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "datlime/tensor.hpp"

namespace datlime {

enum class LayerKind : std::uint8_t { Conv2D = 0, MaxPool = 1, Dense = 2, Dropout = 3, Activation = 4 };
enum class ActivationKind : std::uint8_t { ReLU = 0, Sigmoid = 1, Softmax = 2 };

std::string to_string(LayerKind kind);
std::string to_string(ActivationKind kind);

/// One layer of a sequential network. Which fields matter depends on kind:
/// Conv2D uses units (output channels), kernel, stride, pad; MaxPool uses
/// kernel (window) and stride; Dense uses units; Dropout uses rate.
struct LayerSpec {
  LayerKind kind = LayerKind::Activation;
  std::size_t units = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t pad = 0;
  float rate = 0.0f;
  ActivationKind activation = ActivationKind::ReLU;
  bool trainable = true;

  static LayerSpec conv2d(std::size_t channels, std::size_t stride = 1, std::size_t pad = 1);
  static LayerSpec max_pool(std::size_t window = 2, std::size_t stride = 2);
  static LayerSpec dense(std::size_t units);
  static LayerSpec dropout(float rate);
  static LayerSpec relu() { return act(ActivationKind::ReLU); }
  static LayerSpec sigmoid() { return act(ActivationKind::Sigmoid); }
  static LayerSpec softmax() { return act(ActivationKind::Softmax); }
  static LayerSpec act(ActivationKind kind);

  bool has_parameters() const { return kind == LayerKind::Conv2D || kind == LayerKind::Dense; }
  void validate() const;
  bool operator==(const LayerSpec&) const = default;
};

template <class T>
struct LayerParams {
  std::vector<T> weights;  ///< Conv2D: [out, in, k, k]; Dense: [in, out]
  std::vector<T> bias;     ///< [out]
  bool operator==(const LayerParams&) const = default;
};

/// Input geometry of one sample: channels x height x width.
struct InputShape {
  std::size_t channels = 1, height = 64, width = 64;
  bool operator==(const InputShape&) const = default;
};

/// Sequential CNN. Parameters live beside the layer specs; the freeze mask
/// is the negation of each layer's trainable flag.
template <class T>
class NetworkT {
 public:
  NetworkT() = default;
  NetworkT(InputShape input, std::vector<LayerSpec> layers);

  const InputShape& input_shape() const { return input_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t layer_count() const { return layers_.size(); }

  LayerParams<T>& params(std::size_t layer) { return params_[layer]; }
  const LayerParams<T>& params(std::size_t layer) const { return params_[layer]; }

  /// Per-sample output shape of layer i (activation shapes, batch excluded).
  const std::vector<std::size_t>& output_shape(std::size_t layer) const { return shapes_[layer + 1]; }
  const std::vector<std::size_t>& input_sample_shape() const { return shapes_.front(); }

  std::size_t parameter_count() const;

  /// true = frozen. Layers without parameters report their flag anyway.
  std::vector<bool> freeze_mask() const;
  void set_freeze_mask(const std::vector<bool>& mask);
  void set_trainable(std::size_t layer, bool trainable) { layers_[layer].trainable = trainable; }

  /// He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
  void init_he_uniform(std::uint64_t seed);

  template <class U>
  NetworkT<U> cast() const {
    NetworkT<U> out(input_, layers_);
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      out.params(i).weights.assign(params_[i].weights.begin(), params_[i].weights.end());
      out.params(i).bias.assign(params_[i].bias.begin(), params_[i].bias.end());
    }
    return out;
  }

  bool operator==(const NetworkT&) const = default;

 private:
  InputShape input_;
  std::vector<LayerSpec> layers_;
  std::vector<LayerParams<T>> params_;
  std::vector<std::vector<std::size_t>> shapes_;
};

using Network = NetworkT<float>;

/// Conv3x3(8)-ReLU-Pool-Conv3x3(16)-ReLU-Pool-Dense(32)-ReLU-Dropout-Dense(1)-Sigmoid.
std::vector<LayerSpec> compact_architecture(float dropout_rate = 0.5f);

/// Deeper variant with four conv blocks, used for fine-tuning experiments
/// where the early blocks are frozen.
std::vector<LayerSpec> transfer_architecture(float dropout_rate = 0.5f);

/// Freezes every parameter layer except the last two Conv2D layers and all
/// layers after them (the classification head).
std::vector<bool> default_freeze_mask(const std::vector<LayerSpec>& layers);

/// Everything backward needs from a forward pass.
template <class T>
struct ForwardTrace {
  std::vector<BasicTensor<T>> activations;  ///< [0] = input, [i+1] = output of layer i
  std::vector<std::vector<std::uint32_t>> pool_argmax;
  std::vector<std::vector<T>> dropout_scale;  ///< 0 or 1/(1-rate) per element
  bool train_mode = false;

  const BasicTensor<T>& output() const { return activations.back(); }
};

template <class T>
struct LayerGradient {
  std::size_t layer = 0;
  std::vector<T> weights;
  std::vector<T> bias;
};

/// Gradients for trainable parameter layers only, in layer order.
template <class T>
using Gradients = std::vector<LayerGradient<T>>;

/// z = W^T x + b for x of shape [in] or [N, in] and W of shape [in, out].
/// A bias of length 1 broadcasts.
template <class T>
BasicTensor<T> dense_affine(const BasicTensor<T>& x, const BasicTensor<T>& weights, std::span<const T> bias);

template <class T>
T sigmoid(T x);
template <class T>
T sigmoid_derivative(T x);

/// Elementwise sigmoid, sigmoid derivative or ReLU; softmax acts on the
/// last axis with max subtraction.
enum class ActivationFn : std::uint8_t { Sigmoid, SigmoidDerivative, Softmax, ReLU };
template <class T>
BasicTensor<T> activation(ActivationFn fn, const BasicTensor<T>& z);

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps].
template <class T>
T bce_loss(std::span<const T> probs, std::span<const T> labels);

/// Runs the network on a batch shaped [N, C, H, W] (or [N, features] when
/// the first layer is Dense). Dropout is active only in train mode and draws
/// its masks from dropout_seed.
template <class T>
ForwardTrace<T> forward_trace(const NetworkT<T>& net, const BasicTensor<T>& batch, bool train_mode,
                              std::uint64_t dropout_seed = 0);

template <class T>
BasicTensor<T> forward(const NetworkT<T>& net, const BasicTensor<T>& batch, bool train_mode,
                       std::uint64_t dropout_seed = 0) {
  return forward_trace(net, batch, train_mode, dropout_seed).activations.back();
}

/// Back-propagates mean BCE of the network output (one probability per
/// sample) against labels. Frozen layers produce no entry.
template <class T>
Gradients<T> backward(const NetworkT<T>& net, const ForwardTrace<T>& trace, std::span<const T> labels);

extern template class NetworkT<float>;
extern template class NetworkT<double>;

}  // namespace datlime

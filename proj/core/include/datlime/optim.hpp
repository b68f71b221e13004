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
#include <span>
#include <vector>

#include "datlime/network.hpp"

namespace datlime {

/// Adam settings plus the training schedule. Defaults follow the
/// reference training recipe (300 epochs, batches of 32/16, 32 training
/// and 4 validation steps per epoch, lr 1e-3, betas 0.9/0.999).
struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 300;
  std::size_t batch_size_train = 32;
  std::size_t batch_size_val = 16;
  std::size_t steps_train = 32;
  std::size_t steps_val = 4;

  void validate() const;
  bool operator==(const OptimizerConfig&) const = default;
};

/// First and second moments for one parameter layer.
struct AdamMoments {
  std::vector<float> m_weights, v_weights, m_bias, v_bias;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<AdamMoments> layers;  ///< indexed by layer, sized lazily
};

/// One bias-corrected Adam update of a flat parameter block at step t >= 1.
void adam_update(std::span<float> params, std::span<const float> grads, std::span<float> m, std::span<float> v,
                 const OptimizerConfig& config, std::uint64_t t);

/// Applies gradients to the trainable layers of net, advancing state.step.
/// Throws NumericError (and changes nothing) when a gradient is not finite.
void adam_step(Network& net, const Gradients<float>& grads, AdamState& state, const OptimizerConfig& config);

}  // namespace datlime

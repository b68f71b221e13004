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

#include "datlime/optim.hpp"

#include <cmath>
#include <string>

#include "datlime/error.hpp"

namespace datlime {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw RangeError("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw RangeError("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw RangeError("beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw RangeError("epsilon must be > 0");
  if (batch_size_train == 0 || batch_size_val == 0) throw RangeError("batch sizes must be >= 1");
}

void adam_update(std::span<float> params, std::span<const float> grads, std::span<float> m, std::span<float> v,
                 const OptimizerConfig& config, std::uint64_t t) {
  if (t == 0) throw RangeError("adam step count starts at 1");
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    throw ShapeError("adam_update: parameter, gradient and moment sizes differ");
  }
  const double b1 = config.beta1, b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double mi = b1 * m[i] + (1.0 - b1) * g;
    const double vi = b2 * v[i] + (1.0 - b2) * g * g;
    m[i] = static_cast<float>(mi);
    v[i] = static_cast<float>(vi);
    const double step = config.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + config.epsilon);
    params[i] = static_cast<float>(params[i] - step);
  }
}

void adam_step(Network& net, const Gradients<float>& grads, AdamState& state, const OptimizerConfig& config) {
  for (const auto& g : grads) {
    if (g.layer >= net.layer_count() || !net.layers()[g.layer].trainable) {
      throw ValidationError("gradient for frozen or unknown layer " + std::to_string(g.layer));
    }
    for (float x : g.weights)
      if (!std::isfinite(x)) throw NumericError("non-finite gradient in layer " + std::to_string(g.layer));
    for (float x : g.bias)
      if (!std::isfinite(x)) throw NumericError("non-finite gradient in layer " + std::to_string(g.layer));
  }
  if (state.layers.size() < net.layer_count()) state.layers.resize(net.layer_count());
  const std::uint64_t t = ++state.step;
  for (const auto& g : grads) {
    auto& p = net.params(g.layer);
    auto& mo = state.layers[g.layer];
    if (mo.m_weights.size() != p.weights.size()) {
      mo.m_weights.assign(p.weights.size(), 0.0f);
      mo.v_weights.assign(p.weights.size(), 0.0f);
      mo.m_bias.assign(p.bias.size(), 0.0f);
      mo.v_bias.assign(p.bias.size(), 0.0f);
    }
    adam_update(p.weights, g.weights, mo.m_weights, mo.v_weights, config, t);
    adam_update(p.bias, g.bias, mo.m_bias, mo.v_bias, config, t);
  }
}

}  // namespace datlime

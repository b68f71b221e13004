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

#include "datlime/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "datlime/rng.hpp"

namespace datlime {

namespace {

std::size_t product(const std::vector<std::size_t>& s) { return BasicTensor<float>::element_count(s); }

std::vector<std::size_t> with_batch(std::size_t n, const std::vector<std::size_t>& sample) {
  std::vector<std::size_t> s{n};
  s.insert(s.end(), sample.begin(), sample.end());
  return s;
}

template <class T>
void conv_forward(const LayerSpec& L, const LayerParams<T>& P, const std::vector<std::size_t>& in_shape,
                  const std::vector<std::size_t>& out_shape, std::span<const T> in, std::span<T> out) {
  const std::size_t C = in_shape[0], H = in_shape[1], W = in_shape[2];
  const std::size_t O = out_shape[0], Ho = out_shape[1], Wo = out_shape[2];
  const std::size_t K = L.kernel, S = L.stride;
  const long pad = static_cast<long>(L.pad);
  for (std::size_t o = 0; o < O; ++o) {
    T* dst = out.data() + o * Ho * Wo;
    std::fill(dst, dst + Ho * Wo, P.bias[o]);
    for (std::size_t c = 0; c < C; ++c) {
      const T* src = in.data() + c * H * W;
      for (std::size_t ky = 0; ky < K; ++ky)
        for (std::size_t kx = 0; kx < K; ++kx) {
          const T w = P.weights[((o * C + c) * K + ky) * K + kx];
          for (std::size_t oy = 0; oy < Ho; ++oy) {
            const long iy = static_cast<long>(oy * S + ky) - pad;
            if (iy < 0 || iy >= static_cast<long>(H)) continue;
            const T* row = src + iy * W;
            T* orow = dst + oy * Wo;
            for (std::size_t ox = 0; ox < Wo; ++ox) {
              const long ix = static_cast<long>(ox * S + kx) - pad;
              if (ix < 0 || ix >= static_cast<long>(W)) continue;
              orow[ox] += w * row[ix];
            }
          }
        }
    }
  }
}

// Accumulates dW, db and (when din is non-empty) dX for one sample.
template <class T>
void conv_backward(const LayerSpec& L, const LayerParams<T>& P, const std::vector<std::size_t>& in_shape,
                   const std::vector<std::size_t>& out_shape, std::span<const T> in, std::span<const T> dout,
                   LayerGradient<T>* grad, std::span<T> din) {
  const std::size_t C = in_shape[0], H = in_shape[1], W = in_shape[2];
  const std::size_t O = out_shape[0], Ho = out_shape[1], Wo = out_shape[2];
  const std::size_t K = L.kernel, S = L.stride;
  const long pad = static_cast<long>(L.pad);
  for (std::size_t o = 0; o < O; ++o) {
    const T* g = dout.data() + o * Ho * Wo;
    if (grad) {
      T sum = 0;
      for (std::size_t i = 0; i < Ho * Wo; ++i) sum += g[i];
      grad->bias[o] += sum;
    }
    for (std::size_t c = 0; c < C; ++c) {
      const T* src = in.data() + c * H * W;
      T* dsrc = din.empty() ? nullptr : din.data() + c * H * W;
      for (std::size_t ky = 0; ky < K; ++ky)
        for (std::size_t kx = 0; kx < K; ++kx) {
          const std::size_t widx = ((o * C + c) * K + ky) * K + kx;
          const T w = P.weights[widx];
          T acc = 0;
          for (std::size_t oy = 0; oy < Ho; ++oy) {
            const long iy = static_cast<long>(oy * S + ky) - pad;
            if (iy < 0 || iy >= static_cast<long>(H)) continue;
            const T* grow = g + oy * Wo;
            for (std::size_t ox = 0; ox < Wo; ++ox) {
              const long ix = static_cast<long>(ox * S + kx) - pad;
              if (ix < 0 || ix >= static_cast<long>(W)) continue;
              acc += grow[ox] * src[iy * W + ix];
              if (dsrc) dsrc[iy * W + ix] += w * grow[ox];
            }
          }
          if (grad) grad->weights[widx] += acc;
        }
    }
  }
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2D: return "conv2d";
    case LayerKind::MaxPool: return "maxpool";
    case LayerKind::Dense: return "dense";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Activation: return "activation";
  }
  return "?";
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Softmax: return "softmax";
  }
  return "?";
}

LayerSpec LayerSpec::conv2d(std::size_t channels, std::size_t stride, std::size_t pad) {
  LayerSpec s;
  s.kind = LayerKind::Conv2D;
  s.units = channels;
  s.kernel = 3;
  s.stride = stride;
  s.pad = pad;
  return s;
}

LayerSpec LayerSpec::max_pool(std::size_t window, std::size_t stride) {
  LayerSpec s;
  s.kind = LayerKind::MaxPool;
  s.kernel = window;
  s.stride = stride;
  return s;
}

LayerSpec LayerSpec::dense(std::size_t units) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.units = units;
  return s;
}

LayerSpec LayerSpec::dropout(float rate) {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::act(ActivationKind kind) {
  LayerSpec s;
  s.kind = LayerKind::Activation;
  s.activation = kind;
  return s;
}

void LayerSpec::validate() const {
  switch (kind) {
    case LayerKind::Conv2D:
      if (units == 0 || kernel == 0 || stride == 0) throw ShapeError("conv2d needs channels, kernel and stride >= 1");
      break;
    case LayerKind::MaxPool:
      if (kernel == 0 || stride == 0) throw ShapeError("maxpool needs window and stride >= 1");
      break;
    case LayerKind::Dense:
      if (units == 0) throw ShapeError("dense needs units >= 1");
      break;
    case LayerKind::Dropout:
      if (!(rate >= 0.0f && rate < 1.0f)) throw RangeError("dropout rate must be in [0, 1)");
      break;
    case LayerKind::Activation: break;
  }
}

template <class T>
NetworkT<T>::NetworkT(InputShape input, std::vector<LayerSpec> layers) : input_(input), layers_(std::move(layers)) {
  shapes_.push_back({input_.channels, input_.height, input_.width});
  params_.resize(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& L = layers_[i];
    L.validate();
    const auto& in = shapes_.back();
    std::vector<std::size_t> out;
    switch (L.kind) {
      case LayerKind::Conv2D: {
        if (in.size() != 3) throw ShapeError("conv2d layer " + std::to_string(i) + " needs a [C, H, W] input");
        if (in[1] + 2 * L.pad < L.kernel || in[2] + 2 * L.pad < L.kernel) {
          throw ShapeError("conv2d layer " + std::to_string(i) + " kernel larger than padded input");
        }
        out = {L.units, (in[1] + 2 * L.pad - L.kernel) / L.stride + 1, (in[2] + 2 * L.pad - L.kernel) / L.stride + 1};
        params_[i].weights.assign(L.units * in[0] * L.kernel * L.kernel, T(0));
        params_[i].bias.assign(L.units, T(0));
        break;
      }
      case LayerKind::MaxPool: {
        if (in.size() != 3) throw ShapeError("maxpool layer " + std::to_string(i) + " needs a [C, H, W] input");
        if (in[1] < L.kernel || in[2] < L.kernel) throw ShapeError("maxpool window larger than input");
        out = {in[0], (in[1] - L.kernel) / L.stride + 1, (in[2] - L.kernel) / L.stride + 1};
        break;
      }
      case LayerKind::Dense: {
        out = {L.units};
        params_[i].weights.assign(product(in) * L.units, T(0));
        params_[i].bias.assign(L.units, T(0));
        break;
      }
      case LayerKind::Dropout:
      case LayerKind::Activation: out = in; break;
    }
    shapes_.push_back(std::move(out));
  }
}

template <class T>
std::size_t NetworkT<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.weights.size() + p.bias.size();
  return n;
}

template <class T>
std::vector<bool> NetworkT<T>::freeze_mask() const {
  std::vector<bool> mask;
  for (const auto& L : layers_) mask.push_back(!L.trainable);
  return mask;
}

template <class T>
void NetworkT<T>::set_freeze_mask(const std::vector<bool>& mask) {
  if (mask.size() != layers_.size()) throw ShapeError("freeze mask length does not match layer count");
  for (std::size_t i = 0; i < mask.size(); ++i) layers_[i].trainable = !mask[i];
}

template <class T>
void NetworkT<T>::init_he_uniform(std::uint64_t seed) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i].has_parameters()) continue;
    const std::size_t fan_in = params_[i].weights.size() / layers_[i].units;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    Rng rng(derive_seed(seed, i));
    for (T& w : params_[i].weights) w = static_cast<T>(uniform(rng, -limit, limit));
    std::fill(params_[i].bias.begin(), params_[i].bias.end(), T(0));
  }
}

std::vector<LayerSpec> compact_architecture(float dropout_rate) {
  return {LayerSpec::conv2d(8),  LayerSpec::relu(),  LayerSpec::max_pool(),
          LayerSpec::conv2d(16), LayerSpec::relu(),  LayerSpec::max_pool(),
          LayerSpec::dense(32),  LayerSpec::relu(),  LayerSpec::dropout(dropout_rate),
          LayerSpec::dense(1),   LayerSpec::sigmoid()};
}

std::vector<LayerSpec> transfer_architecture(float dropout_rate) {
  return {LayerSpec::conv2d(8),  LayerSpec::relu(), LayerSpec::max_pool(), LayerSpec::conv2d(8),
          LayerSpec::relu(),     LayerSpec::max_pool(), LayerSpec::conv2d(16), LayerSpec::relu(),
          LayerSpec::max_pool(), LayerSpec::conv2d(16), LayerSpec::relu(), LayerSpec::max_pool(),
          LayerSpec::dropout(dropout_rate), LayerSpec::dense(32), LayerSpec::relu(),
          LayerSpec::dropout(dropout_rate), LayerSpec::dense(1), LayerSpec::sigmoid()};
}

std::vector<bool> default_freeze_mask(const std::vector<LayerSpec>& layers) {
  std::vector<std::size_t> convs;
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (layers[i].kind == LayerKind::Conv2D) convs.push_back(i);
  const std::size_t first_open = convs.size() >= 2 ? convs[convs.size() - 2] : convs.empty() ? 0 : convs.front();
  std::vector<bool> mask(layers.size(), false);
  for (std::size_t i = 0; i < first_open; ++i) mask[i] = true;
  return mask;
}

template <class T>
BasicTensor<T> dense_affine(const BasicTensor<T>& x, const BasicTensor<T>& weights, std::span<const T> bias) {
  const bool batched = x.rank() == 2;
  if (x.rank() != 1 && !batched) throw ShapeError("dense_affine expects x of rank 1 or 2");
  const std::size_t n = batched ? x.shape[0] : 1;
  const std::size_t in = batched ? x.shape[1] : x.shape[0];
  std::size_t out = 0;
  if (weights.rank() == 1 && weights.shape[0] == in) {
    out = 1;
  } else if (weights.rank() == 2 && weights.shape[0] == in) {
    out = weights.shape[1];
  } else {
    throw ShapeError("dense_affine: weight shape does not conform to input");
  }
  if (bias.size() != out && bias.size() != 1 && !bias.empty()) throw ShapeError("dense_affine: bias length mismatch");

  BasicTensor<T> z(batched ? std::vector<std::size_t>{n, out} : std::vector<std::size_t>{out});
  for (std::size_t s = 0; s < n; ++s) {
    T* zs = z.values.data() + s * out;
    for (std::size_t o = 0; o < out; ++o) zs[o] = bias.empty() ? T(0) : bias[bias.size() == 1 ? 0 : o];
    const T* xs = x.values.data() + s * in;
    for (std::size_t i = 0; i < in; ++i) {
      const T xi = xs[i];
      const T* wrow = weights.values.data() + i * out;
      for (std::size_t o = 0; o < out; ++o) zs[o] += wrow[o] * xi;
    }
  }
  return z;
}

template <class T>
T sigmoid(T x) {
  // Split by sign so exp never overflows.
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <class T>
T sigmoid_derivative(T x) {
  const T s = sigmoid(x);
  return s * (T(1) - s);
}

template <class T>
BasicTensor<T> activation(ActivationFn fn, const BasicTensor<T>& z) {
  BasicTensor<T> out = z;
  switch (fn) {
    case ActivationFn::Sigmoid:
      for (T& v : out.values) v = sigmoid(v);
      break;
    case ActivationFn::SigmoidDerivative:
      for (T& v : out.values) v = sigmoid_derivative(v);
      break;
    case ActivationFn::ReLU:
      for (T& v : out.values) v = std::max(v, T(0));
      break;
    case ActivationFn::Softmax: {
      if (z.shape.empty() || z.shape.back() == 0) throw ShapeError("softmax needs at least one class");
      const std::size_t d = z.shape.back();
      for (std::size_t g = 0; g < out.size() / d; ++g) {
        T* row = out.values.data() + g * d;
        const T peak = *std::max_element(row, row + d);
        T sum = 0;
        for (std::size_t i = 0; i < d; ++i) sum += (row[i] = std::exp(row[i] - peak));
        for (std::size_t i = 0; i < d; ++i) row[i] /= sum;
      }
      break;
    }
  }
  return out;
}

template <class T>
T bce_loss(std::span<const T> probs, std::span<const T> labels) {
  if (probs.size() != labels.size()) throw ShapeError("bce_loss: probs and labels differ in length");
  if (probs.empty()) throw ShapeError("bce_loss: empty batch");
  const T eps = static_cast<T>(kBceEpsilon);
  T total = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const T p = std::clamp(probs[i], eps, T(1) - eps);
    const T y = labels[i];
    total += y * std::log(p) + (T(1) - y) * std::log(T(1) - p);
  }
  return -total / static_cast<T>(probs.size());
}

template <class T>
ForwardTrace<T> forward_trace(const NetworkT<T>& net, const BasicTensor<T>& batch, bool train_mode,
                              std::uint64_t dropout_seed) {
  const auto& in_shape = net.input_sample_shape();
  const std::size_t per_sample = product(in_shape);
  if (batch.rank() < 1 || batch.stride() != per_sample || batch.size() != batch.batch() * per_sample) {
    throw ShapeError("batch shape does not match the network input");
  }
  const std::size_t N = batch.batch();

  ForwardTrace<T> trace;
  trace.train_mode = train_mode;
  trace.activations.reserve(net.layer_count() + 1);
  trace.activations.emplace_back(with_batch(N, in_shape), batch.values);
  trace.pool_argmax.resize(net.layer_count());
  trace.dropout_scale.resize(net.layer_count());

  for (std::size_t li = 0; li < net.layer_count(); ++li) {
    const LayerSpec& L = net.layers()[li];
    const auto& ish = li == 0 ? in_shape : net.output_shape(li - 1);
    const auto& osh = net.output_shape(li);
    const BasicTensor<T>& x = trace.activations.back();
    BasicTensor<T> y(with_batch(N, osh));

    switch (L.kind) {
      case LayerKind::Conv2D:
        for (std::size_t n = 0; n < N; ++n) conv_forward(L, net.params(li), ish, osh, x.sample(n), y.sample(n));
        break;
      case LayerKind::MaxPool: {
        const std::size_t C = ish[0], H = ish[1], W = ish[2], Ho = osh[1], Wo = osh[2];
        auto& arg = trace.pool_argmax[li];
        arg.resize(y.size());
        for (std::size_t n = 0; n < N; ++n) {
          const auto xs = x.sample(n);
          auto ys = y.sample(n);
          for (std::size_t c = 0; c < C; ++c)
            for (std::size_t oy = 0; oy < Ho; ++oy)
              for (std::size_t ox = 0; ox < Wo; ++ox) {
                std::size_t best = c * H * W + (oy * L.stride) * W + ox * L.stride;
                for (std::size_t ky = 0; ky < L.kernel; ++ky)
                  for (std::size_t kx = 0; kx < L.kernel; ++kx) {
                    const std::size_t idx = c * H * W + (oy * L.stride + ky) * W + ox * L.stride + kx;
                    if (xs[idx] > xs[best]) best = idx;
                  }
                const std::size_t o = (c * Ho + oy) * Wo + ox;
                ys[o] = xs[best];
                arg[n * ys.size() + o] = static_cast<std::uint32_t>(best);
              }
        }
        break;
      }
      case LayerKind::Dense: {
        const std::size_t in = product(ish);
        BasicTensor<T> flat({N, in}, x.values);
        BasicTensor<T> w({in, L.units}, net.params(li).weights);
        y = dense_affine(flat, w, std::span<const T>(net.params(li).bias));
        break;
      }
      case LayerKind::Dropout: {
        y.values = x.values;
        if (train_mode && L.rate > 0.0f) {
          auto& scale = trace.dropout_scale[li];
          scale.resize(y.size());
          Rng rng(derive_seed(dropout_seed, li));
          const T keep = static_cast<T>(1.0 / (1.0 - static_cast<double>(L.rate)));
          for (std::size_t i = 0; i < y.size(); ++i) {
            scale[i] = uniform01(rng) < static_cast<double>(L.rate) ? T(0) : keep;
            y.values[i] *= scale[i];
          }
        }
        break;
      }
      case LayerKind::Activation: {
        const ActivationFn fn = L.activation == ActivationKind::ReLU      ? ActivationFn::ReLU
                                : L.activation == ActivationKind::Sigmoid ? ActivationFn::Sigmoid
                                                                          : ActivationFn::Softmax;
        y.values = activation(fn, x).values;
        break;
      }
    }
    trace.activations.push_back(std::move(y));
  }
  return trace;
}

template <class T>
Gradients<T> backward(const NetworkT<T>& net, const ForwardTrace<T>& trace, std::span<const T> labels) {
  if (trace.activations.size() != net.layer_count() + 1) throw ShapeError("trace does not belong to this network");
  const BasicTensor<T>& out = trace.output();
  const std::size_t N = out.batch();
  if (out.stride() != 1) throw ShapeError("backward expects one probability per sample");
  if (labels.size() != N) throw ShapeError("label count does not match batch size");

  std::size_t first_trainable = net.layer_count();
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    if (net.layers()[i].has_parameters() && net.layers()[i].trainable) {
      first_trainable = i;
      break;
    }
  }
  Gradients<T> grads;
  if (first_trainable == net.layer_count()) return grads;

  // dL/dp for the clamped mean BCE.
  const T eps = static_cast<T>(kBceEpsilon);
  BasicTensor<T> g(out.shape);
  for (std::size_t n = 0; n < N; ++n) {
    const T p = out.values[n], y = labels[n];
    if (p <= eps || p >= T(1) - eps) continue;
    g.values[n] = (-y / p + (T(1) - y) / (T(1) - p)) / static_cast<T>(N);
  }

  for (std::size_t li = net.layer_count(); li-- > first_trainable;) {
    const LayerSpec& L = net.layers()[li];
    const auto& ish = li == 0 ? net.input_sample_shape() : net.output_shape(li - 1);
    const auto& osh = net.output_shape(li);
    const BasicTensor<T>& x = trace.activations[li];
    const BasicTensor<T>& y = trace.activations[li + 1];
    const bool need_input_grad = li > first_trainable;
    BasicTensor<T> gx;
    if (need_input_grad) gx = BasicTensor<T>(x.shape);

    LayerGradient<T>* lg = nullptr;
    if (L.has_parameters() && L.trainable) {
      grads.push_back({li, std::vector<T>(net.params(li).weights.size(), T(0)),
                       std::vector<T>(net.params(li).bias.size(), T(0))});
      lg = &grads.back();
    }

    switch (L.kind) {
      case LayerKind::Conv2D:
        for (std::size_t n = 0; n < N; ++n) {
          conv_backward(L, net.params(li), ish, osh, x.sample(n), std::span<const T>(g.sample(n)), lg,
                        need_input_grad ? gx.sample(n) : std::span<T>());
        }
        break;
      case LayerKind::MaxPool:
        if (need_input_grad) {
          const auto& arg = trace.pool_argmax[li];
          const std::size_t per = y.stride();
          for (std::size_t n = 0; n < N; ++n) {
            auto gxs = gx.sample(n);
            for (std::size_t o = 0; o < per; ++o) gxs[arg[n * per + o]] += g.values[n * per + o];
          }
        }
        break;
      case LayerKind::Dense: {
        const std::size_t in = product(ish), U = L.units;
        const auto& W = net.params(li).weights;
        for (std::size_t n = 0; n < N; ++n) {
          const T* xs = x.values.data() + n * in;
          const T* gs = g.values.data() + n * U;
          if (lg) {
            for (std::size_t u = 0; u < U; ++u) lg->bias[u] += gs[u];
            for (std::size_t i = 0; i < in; ++i) {
              const T xi = xs[i];
              T* dw = lg->weights.data() + i * U;
              for (std::size_t u = 0; u < U; ++u) dw[u] += xi * gs[u];
            }
          }
          if (need_input_grad) {
            T* gxs = gx.values.data() + n * in;
            for (std::size_t i = 0; i < in; ++i) {
              const T* wrow = W.data() + i * U;
              T acc = 0;
              for (std::size_t u = 0; u < U; ++u) acc += wrow[u] * gs[u];
              gxs[i] = acc;
            }
          }
        }
        break;
      }
      case LayerKind::Dropout:
        if (need_input_grad) {
          const auto& scale = trace.dropout_scale[li];
          for (std::size_t i = 0; i < gx.size(); ++i) gx.values[i] = scale.empty() ? g.values[i] : g.values[i] * scale[i];
        }
        break;
      case LayerKind::Activation:
        if (need_input_grad) {
          switch (L.activation) {
            case ActivationKind::ReLU:
              for (std::size_t i = 0; i < gx.size(); ++i) gx.values[i] = y.values[i] > T(0) ? g.values[i] : T(0);
              break;
            case ActivationKind::Sigmoid:
              // phi'(z) = phi(z) (1 - phi(z)) evaluated from the stored output.
              for (std::size_t i = 0; i < gx.size(); ++i) gx.values[i] = g.values[i] * y.values[i] * (T(1) - y.values[i]);
              break;
            case ActivationKind::Softmax: {
              const std::size_t d = y.shape.back();
              for (std::size_t r = 0; r < y.size() / d; ++r) {
                const T* s = y.values.data() + r * d;
                const T* gr = g.values.data() + r * d;
                T dot = 0;
                for (std::size_t i = 0; i < d; ++i) dot += gr[i] * s[i];
                for (std::size_t i = 0; i < d; ++i) gx.values[r * d + i] = s[i] * (gr[i] - dot);
              }
              break;
            }
          }
        }
        break;
    }
    if (need_input_grad) g = std::move(gx);
  }
  std::reverse(grads.begin(), grads.end());
  return grads;
}

template class NetworkT<float>;
template class NetworkT<double>;

#define DATLIME_INSTANTIATE(T)                                                                              \
  template BasicTensor<T> dense_affine<T>(const BasicTensor<T>&, const BasicTensor<T>&, std::span<const T>); \
  template T sigmoid<T>(T);                                                                                  \
  template T sigmoid_derivative<T>(T);                                                                       \
  template BasicTensor<T> activation<T>(ActivationFn, const BasicTensor<T>&);                                \
  template T bce_loss<T>(std::span<const T>, std::span<const T>);                                            \
  template ForwardTrace<T> forward_trace<T>(const NetworkT<T>&, const BasicTensor<T>&, bool, std::uint64_t); \
  template Gradients<T> backward<T>(const NetworkT<T>&, const ForwardTrace<T>&, std::span<const T>);

DATLIME_INSTANTIATE(float)
DATLIME_INSTANTIATE(double)

#undef DATLIME_INSTANTIATE

}  // namespace datlime

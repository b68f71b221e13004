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

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here calls into the library's solvers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "datlime/network.hpp"
#include "datlime/rng.hpp"

namespace datlime::oracle {

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) throw std::runtime_error("singular system");
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t j = r + 1; j < n; ++j) s -= a[r][j] * x[j];
    x[r] = s / a[r][r];
  }
  return x;
}

/// Weighted ridge with an unpenalized intercept. Row i of `masks` is the
/// binary design row z_i, `y` the responses and `w` the sample weights.
/// Returns [intercept, beta_1 .. beta_k].
inline std::vector<double> weighted_ridge(const std::vector<std::vector<std::uint8_t>>& masks,
                                          const std::vector<double>& y, const std::vector<double>& w,
                                          double lambda) {
  const std::size_t k = masks.front().size(), d = k + 1;
  std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
  std::vector<double> b(d, 0.0);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    row[0] = 1.0;
    for (std::size_t j = 0; j < k; ++j) row[j + 1] = masks[i][j];
    for (std::size_t r = 0; r < d; ++r) {
      b[r] += w[i] * row[r] * y[i];
      for (std::size_t c = 0; c < d; ++c) a[r][c] += w[i] * row[r] * row[c];
    }
  }
  for (std::size_t j = 1; j < d; ++j) a[j][j] += lambda;
  return gauss_solve(a, b);
}

/// LIME proximity weight written out from its definition.
inline double lime_kernel(const std::vector<std::uint8_t>& mask, double sigma) {
  double on = 0;
  for (auto m : mask) on += m;
  const double d = on == 0 ? 1.0 : 1.0 - on / std::sqrt(on * static_cast<double>(mask.size()));
  return std::exp(-d * d / (sigma * sigma));
}

struct GradCheck {
  double max_rel_error = 0;
  std::size_t parameters = 0;
};

/// Central finite differences of the mean BCE against backward() for
/// every trainable parameter. Dropout masks are pinned by dropout_seed.
inline GradCheck gradient_check(NetworkT<double> net, const BasicTensor<double>& batch,
                                const std::vector<double>& labels, bool train_mode, std::uint64_t dropout_seed,
                                double step = 1e-5) {
  auto loss = [&](const NetworkT<double>& n) {
    const auto out = forward(n, batch, train_mode, dropout_seed);
    return bce_loss<double>(out.values, labels);
  };
  const auto trace = forward_trace(net, batch, train_mode, dropout_seed);
  const auto grads = backward<double>(net, trace, labels);
  GradCheck result;
  for (const auto& g : grads) {
    for (int part = 0; part < 2; ++part) {
      auto& analytic = part == 0 ? g.weights : g.bias;
      for (std::size_t i = 0; i < analytic.size(); ++i) {
        auto& theta = part == 0 ? net.params(g.layer).weights[i] : net.params(g.layer).bias[i];
        const double saved = theta;
        theta = saved + step;
        const double up = loss(net);
        theta = saved - step;
        const double down = loss(net);
        theta = saved;
        const double numeric = (up - down) / (2 * step);
        const double denom = std::max(std::abs(numeric) + std::abs(analytic[i]), 1e-8);
        result.max_rel_error = std::max(result.max_rel_error, std::abs(numeric - analytic[i]) / denom);
        ++result.parameters;
      }
    }
  }
  return result;
}

/// Small net with smooth hidden units for gradient checking.
inline NetworkT<double> gradcheck_network(std::uint64_t seed) {
  NetworkT<double> net(InputShape{1, 8, 8},
                       {LayerSpec::conv2d(3), LayerSpec::sigmoid(), LayerSpec::max_pool(), LayerSpec::dense(12),
                        LayerSpec::sigmoid(), LayerSpec::dropout(0.3f), LayerSpec::dense(1), LayerSpec::sigmoid()});
  net.init_he_uniform(seed);
  Rng rng(derive_seed(seed, 99));
  for (std::size_t i = 0; i < net.layer_count(); ++i)
    for (auto& b : net.params(i).bias) b = uniform(rng, -0.2, 0.2);
  return net;
}

inline BasicTensor<double> random_batch(std::size_t n, std::size_t h, std::size_t w, std::uint64_t seed) {
  BasicTensor<double> batch({n, 1, h, w});
  Rng rng(seed);
  for (auto& v : batch.values) v = uniform01(rng);
  return batch;
}

}  // namespace datlime::oracle

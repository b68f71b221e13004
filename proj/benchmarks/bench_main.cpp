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

#include <benchmark/benchmark.h>

#include <cmath>

#include "datlime/lime.hpp"
#include "datlime/metrics.hpp"
#include "datlime/network.hpp"
#include "datlime/phantom.hpp"
#include "datlime/rng.hpp"
#include "datlime/slic.hpp"

namespace {

using namespace datlime;

Image phantom_slice() {
  auto spec = PhantomSpec::healthy();
  spec.noise_sigma = 0.02;
  spec.rng_seed = 1;
  return preprocess_volume(generate_phantom(spec).volume, {}).image;
}

void BM_CompactForward(benchmark::State& state) {
  Network net(InputShape{1, 64, 64}, compact_architecture());
  net.init_he_uniform(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  Tensor batch({n, 1, 64, 64}, 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, batch, false));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CompactForward)->Arg(1)->Arg(32);

void BM_CompactTrainStep(benchmark::State& state) {
  Network net(InputShape{1, 64, 64}, compact_architecture());
  net.init_he_uniform(1);
  Tensor batch({32, 1, 64, 64}, 0.5f);
  std::vector<float> labels(32, 1.0f);
  for (auto _ : state) {
    const auto trace = forward_trace(net, batch, true, 3);
    benchmark::DoNotOptimize(backward<float>(net, trace, labels));
  }
}
BENCHMARK(BM_CompactTrainStep);

void BM_Slic(benchmark::State& state) {
  const auto im = phantom_slice();
  for (auto _ : state) benchmark::DoNotOptimize(segment_slic(im, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Slic)->Arg(40)->Arg(100);

void BM_FitSurrogate(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::vector<PerturbationSample> samples;
  for (const auto& m : random_masks(k, 1000, 0.5, 2)) {
    double s = 0;
    for (std::size_t j = 0; j < k; ++j) s += m[j] * std::sin(static_cast<double>(j));
    samples.push_back({m, 1.0 / (1.0 + std::exp(-s))});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_surrogate(samples, {0.25}, 1.0));
}
BENCHMARK(BM_FitSurrogate)->Arg(40)->Arg(100);

void BM_RocTable(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> p;
  std::vector<int> y;
  for (int i = 0; i < state.range(0); ++i) {
    y.push_back(static_cast<int>(rng() & 1u));
    p.push_back(uniform01(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(auc_trapezoid(roc_table(p, y)));
}
BENCHMARK(BM_RocTable)->Arg(63)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();

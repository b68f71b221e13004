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
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "datlime/error.hpp"

namespace datlime {

/// Dense row-major array with a runtime shape.
template <class T>
struct BasicTensor {
  std::vector<std::size_t> shape;
  std::vector<T> values;

  BasicTensor() = default;
  explicit BasicTensor(std::vector<std::size_t> s, T fill = T(0))
      : shape(std::move(s)), values(element_count(shape), fill) {}
  BasicTensor(std::vector<std::size_t> s, std::vector<T> v) : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != element_count(shape)) throw ShapeError("tensor value count does not match shape");
  }

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t size() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  /// Leading (batch) extent.
  std::size_t batch() const { return shape.empty() ? 0 : shape.front(); }
  /// Elements per batch entry.
  std::size_t stride() const { return shape.empty() || shape.front() == 0 ? 0 : values.size() / shape.front(); }

  std::span<T> sample(std::size_t n) { return std::span<T>(values).subspan(n * stride(), stride()); }
  std::span<const T> sample(std::size_t n) const { return std::span<const T>(values).subspan(n * stride(), stride()); }

  bool operator==(const BasicTensor&) const = default;
};

using Tensor = BasicTensor<float>;

}  // namespace datlime

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

#include <queue>
#include <set>

#include "datlime/error.hpp"
#include "datlime/rng.hpp"
#include "datlime/slic.hpp"

namespace datlime {
namespace {

// Checks coverage, id range, contiguity and 4-connectivity by flood fill.
void expect_valid_partition(const SuperpixelMap& m) {
  ASSERT_EQ(m.labels.size(), m.width * m.height);
  std::vector<std::size_t> size(m.k, 0);
  for (auto id : m.labels) {
    ASSERT_LT(id, m.k);
    ++size[id];
  }
  for (std::size_t id = 0; id < m.k; ++id) EXPECT_GT(size[id], 0u) << "missing id " << id;

  std::vector<bool> seen(m.labels.size(), false);
  std::set<std::uint32_t> started;
  for (std::size_t s = 0; s < m.labels.size(); ++s) {
    if (seen[s]) continue;
    const auto id = m.labels[s];
    EXPECT_TRUE(started.insert(id).second) << "segment " << id << " is not 4-connected";
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const std::size_t p = q.front();
      q.pop();
      const std::size_t x = p % m.width, y = p / m.width;
      auto visit = [&](std::size_t nx, std::size_t ny) {
        const std::size_t n = ny * m.width + nx;
        if (!seen[n] && m.labels[n] == id) seen[n] = true, q.push(n);
      };
      if (x > 0) visit(x - 1, y);
      if (x + 1 < m.width) visit(x + 1, y);
      if (y > 0) visit(x, y - 1);
      if (y + 1 < m.height) visit(x, y + 1);
    }
  }
}

Image blobs(std::size_t w, std::size_t h, std::uint64_t seed) {
  Rng rng(seed);
  Image im(w, h);
  for (int b = 0; b < 6; ++b) {
    const double cx = uniform(rng, 0, w), cy = uniform(rng, 0, h), r = uniform(rng, 3, 10), a = uniform01(rng);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        im.at(x, y) += static_cast<float>(a * std::exp(-d2 / (r * r)));
      }
  }
  for (auto& p : im.pixels()) p = std::min(1.0f, p + 0.05f * static_cast<float>(standard_normal(rng)) * 0.1f);
  return im;
}

TEST(Slic, PartitionInvariantsOnVariedImages) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t w = 20 + seed * 5, h = 64 - seed * 2;
    for (std::size_t k : {1u, 7u, 40u, 100u}) {
      for (double c : {1.0, 10.0, 40.0}) {
        const auto m = segment_slic(blobs(w, h, seed), k, c);
        expect_valid_partition(m);
        EXPECT_NO_THROW(m.validate());
        EXPECT_EQ(m.width, w);
      }
    }
  }
}

TEST(Slic, SingleSegment) {
  const auto m = segment_slic(blobs(30, 20, 3), 1);
  EXPECT_EQ(m.k, 1u);
  for (auto id : m.labels) EXPECT_EQ(id, 0u);
}

TEST(Slic, TwoToneImageSplitsAtTheEdge) {
  Image im(16, 12);
  for (std::size_t y = 0; y < 12; ++y)
    for (std::size_t x = 8; x < 16; ++x) im.at(x, y) = 1.0f;
  const auto m = segment_slic(im, 2, 0.5);
  ASSERT_EQ(m.k, 2u);
  std::set<std::size_t> left, right;
  for (std::size_t y = 0; y < 12; ++y)
    for (std::size_t x = 0; x < 16; ++x) (x < 8 ? left : right).insert(y * 16 + x);
  const auto a = m.pixels_of(0), b = m.pixels_of(1);
  const std::set<std::size_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  EXPECT_TRUE((sa == left && sb == right) || (sa == right && sb == left));
}

TEST(Slic, Deterministic) {
  const auto im = blobs(48, 48, 5);
  EXPECT_EQ(segment_slic(im, 30).labels, segment_slic(im, 30).labels);
}

TEST(Slic, GridFactorization) {
  EXPECT_EQ(slic_grid(64, 64, 40), (std::pair<std::size_t, std::size_t>{8, 5}));
  EXPECT_EQ(slic_grid(16, 16, 8), (std::pair<std::size_t, std::size_t>{4, 2}));
  EXPECT_EQ(slic_grid(16, 12, 2), (std::pair<std::size_t, std::size_t>{2, 1}));
}

TEST(Slic, Errors) {
  EXPECT_THROW(segment_slic(Image(), 4), ValidationError);
  EXPECT_THROW(segment_slic(Image(4, 4), 0), ValidationError);
  EXPECT_THROW(segment_slic(Image(4, 4), 17), ValidationError);
  SuperpixelMap bad{2, 1, 2, {0, 0}};
  EXPECT_THROW(bad.validate(), GeometryError);
  SuperpixelMap split{3, 1, 2, {0, 1, 0}};
  EXPECT_THROW(split.validate(), GeometryError);
}

}  // namespace
}  // namespace datlime

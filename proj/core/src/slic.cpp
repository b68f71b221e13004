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

#include "datlime/slic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "datlime/error.hpp"

namespace datlime {

std::vector<std::size_t> SuperpixelMap::pixels_of(std::uint32_t id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == id) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SuperpixelMap::segment_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) {
    if (l < k) ++sizes[l];
  }
  return sizes;
}

void SuperpixelMap::validate() const {
  if (labels.size() != width * height || k == 0) throw GeometryError("superpixel map has inconsistent dimensions");
  for (auto l : labels) {
    if (l >= k) throw GeometryError("superpixel id " + std::to_string(l) + " out of range");
  }
  std::vector<char> seen(k, 0), visited(labels.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (visited[start]) continue;
    const auto id = labels[start];
    if (seen[id]) throw GeometryError("superpixel " + std::to_string(id) + " is not 4-connected");
    seen[id] = 1;
    stack.assign(1, start);
    visited[start] = 1;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const std::size_t x = p % width, y = p / width;
      const std::size_t nbr[4] = {x > 0 ? p - 1 : p, x + 1 < width ? p + 1 : p, y > 0 ? p - width : p,
                                  y + 1 < height ? p + width : p};
      for (std::size_t q : nbr) {
        if (!visited[q] && labels[q] == id) {
          visited[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  for (std::size_t id = 0; id < k; ++id) {
    if (!seen[id]) throw GeometryError("superpixel id " + std::to_string(id) + " is unused");
  }
}

std::pair<std::size_t, std::size_t> slic_grid(std::size_t width, std::size_t height, std::size_t target_k) {
  std::pair<std::size_t, std::size_t> best{1, 1};
  double best_diff = std::numeric_limits<double>::infinity(), best_aspect = best_diff;
  for (std::size_t nx = 1; nx <= std::min(target_k, width); ++nx) {
    for (std::size_t ny : {target_k / nx, (target_k + nx - 1) / nx}) {
      ny = std::clamp<std::size_t>(ny, 1, height);
      const double diff = std::fabs(static_cast<double>(nx * ny) - static_cast<double>(target_k));
      const double aspect = std::fabs(std::log((static_cast<double>(width) / static_cast<double>(nx)) /
                                               (static_cast<double>(height) / static_cast<double>(ny))));
      const bool better = diff < best_diff || (diff == best_diff && aspect < best_aspect - 1e-12) ||
                          (diff == best_diff && std::fabs(aspect - best_aspect) <= 1e-12 && nx > best.first);
      if (better) {
        best = {nx, ny};
        best_diff = diff;
        best_aspect = aspect;
      }
    }
  }
  return best;
}

namespace {

struct Center {
  double x, y, v;
};

struct Groups {
  std::vector<std::size_t> parent, size;
  std::vector<double> sum;
  std::vector<char> keep;

  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void merge_into(std::size_t from, std::size_t to) {
    parent[from] = to;
    size[to] += size[from];
    sum[to] += sum[from];
    keep[to] = keep[to] || keep[from];
  }
  double mean(std::size_t r) const { return sum[r] / static_cast<double>(size[r]); }
};

// Splits labels into 4-connected components; returns component id per pixel.
std::vector<std::size_t> components(const std::vector<std::uint32_t>& labels, std::size_t w, std::size_t h,
                                    std::size_t& count) {
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> comp(labels.size(), kNone), stack;
  count = 0;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (comp[s] != kNone) continue;
    comp[s] = count;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const std::size_t x = p % w, y = p / w;
      const std::size_t nbr[4] = {x > 0 ? p - 1 : p, x + 1 < w ? p + 1 : p, y > 0 ? p - w : p,
                                  y + 1 < h ? p + w : p};
      for (std::size_t q : nbr) {
        if (comp[q] == kNone && labels[q] == labels[s]) {
          comp[q] = count;
          stack.push_back(q);
        }
      }
    }
    ++count;
  }
  return comp;
}

}  // namespace

SuperpixelMap segment_slic(const Image& image, const SlicConfig& config) {
  const std::size_t w = image.width(), h = image.height(), n = image.size();
  if (n == 0) throw ValidationError("cannot segment an empty image");
  if (config.target_k == 0) throw ValidationError("target_k must be at least 1");
  if (config.target_k > n) throw ValidationError("target_k exceeds pixel count");
  if (!(config.compactness > 0) || config.iterations < 1) throw ValidationError("invalid SLIC parameters");

  auto val = [&](std::size_t x, std::size_t y) { return 100.0 * static_cast<double>(image.at(x, y)); };
  auto grad = [&](std::size_t x, std::size_t y) {
    const double gx = val(std::min(x + 1, w - 1), y) - val(x > 0 ? x - 1 : 0, y);
    const double gy = val(x, std::min(y + 1, h - 1)) - val(x, y > 0 ? y - 1 : 0);
    return gx * gx + gy * gy;
  };

  const auto [gx, gy] = slic_grid(w, h, config.target_k);
  const double cw = static_cast<double>(w) / static_cast<double>(gx);
  const double ch = static_cast<double>(h) / static_cast<double>(gy);
  const double S = std::max(cw, ch);

  std::vector<Center> centers;
  for (std::size_t j = 0; j < gy; ++j) {
    for (std::size_t i = 0; i < gx; ++i) {
      auto x = static_cast<std::size_t>((static_cast<double>(i) + 0.5) * cw);
      auto y = static_cast<std::size_t>((static_cast<double>(j) + 0.5) * ch);
      x = std::min(x, w - 1);
      y = std::min(y, h - 1);
      std::size_t bx = x, by = y;
      double bg = grad(x, y);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const long nx = static_cast<long>(x) + dx, ny = static_cast<long>(y) + dy;
          if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) continue;
          const double g = grad(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny));
          if (g < bg) {
            bg = g;
            bx = static_cast<std::size_t>(nx);
            by = static_cast<std::size_t>(ny);
          }
        }
      }
      centers.push_back({static_cast<double>(bx), static_cast<double>(by), val(bx, by)});
    }
  }

  const double m2 = config.compactness * config.compactness / (S * S);
  auto dist2 = [&](const Center& c, std::size_t x, std::size_t y) {
    const double dv = val(x, y) - c.v, dx = static_cast<double>(x) - c.x, dy = static_cast<double>(y) - c.y;
    return dv * dv + (dx * dx + dy * dy) * m2;
  };

  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(n, kUnset);
  std::vector<double> best(n);
  for (int iter = 0; iter < config.iterations; ++iter) {
    std::fill(label.begin(), label.end(), kUnset);
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const auto& ctr = centers[c];
      const auto x0 = static_cast<std::size_t>(std::max(0.0, std::floor(ctr.x - S)));
      const auto y0 = static_cast<std::size_t>(std::max(0.0, std::floor(ctr.y - S)));
      const auto x1 = std::min(w - 1, static_cast<std::size_t>(std::ceil(ctr.x + S)));
      const auto y1 = std::min(h - 1, static_cast<std::size_t>(std::ceil(ctr.y + S)));
      for (std::size_t y = y0; y <= y1; ++y) {
        for (std::size_t x = x0; x <= x1; ++x) {
          const double d = dist2(ctr, x, y);
          if (d < best[y * w + x]) {
            best[y * w + x] = d;
            label[y * w + x] = static_cast<std::uint32_t>(c);
          }
        }
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      if (label[p] != kUnset) continue;
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = dist2(centers[c], p % w, p / w);
        if (d < best[p]) {
          best[p] = d;
          label[p] = static_cast<std::uint32_t>(c);
        }
      }
    }
    std::vector<Center> acc(centers.size(), {0, 0, 0});
    std::vector<std::size_t> cnt(centers.size(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      auto& a = acc[label[p]];
      a.x += static_cast<double>(p % w);
      a.y += static_cast<double>(p / w);
      a.v += val(p % w, p / w);
      ++cnt[label[p]];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (cnt[c] == 0) continue;
      const double k = static_cast<double>(cnt[c]);
      centers[c] = {acc[c].x / k, acc[c].y / k, acc[c].v / k};
    }
  }

  // Connectivity: the largest fragment of each cluster survives if it is not
  // tiny; everything else joins an adjacent group.
  std::size_t ncomp = 0;
  const auto comp = components(label, w, h, ncomp);
  Groups g{std::vector<std::size_t>(ncomp), std::vector<std::size_t>(ncomp, 0), std::vector<double>(ncomp, 0.0),
           std::vector<char>(ncomp, 0)};
  std::iota(g.parent.begin(), g.parent.end(), std::size_t{0});
  std::vector<std::size_t> comp_label(ncomp);
  for (std::size_t p = 0; p < n; ++p) {
    ++g.size[comp[p]];
    g.sum[comp[p]] += val(p % w, p / w);
    comp_label[comp[p]] = label[p];
  }
  const std::size_t min_size = std::max<std::size_t>(1, n / (4 * config.target_k));
  std::vector<std::size_t> largest(centers.size(), ncomp);
  for (std::size_t c = 0; c < ncomp; ++c) {
    auto& l = largest[comp_label[c]];
    if (l == ncomp || g.size[c] > g.size[l]) l = c;
  }
  for (std::size_t l : largest) {
    if (l != ncomp && g.size[l] >= min_size) g.keep[l] = 1;
  }
  if (std::none_of(g.keep.begin(), g.keep.end(), [](char k) { return k != 0; })) {
    g.keep[static_cast<std::size_t>(std::max_element(g.size.begin(), g.size.end()) - g.size.begin())] = 1;
  }

  std::vector<std::vector<std::size_t>> adjacent(ncomp);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t x = p % w, y = p / w;
    if (x + 1 < w && comp[p + 1] != comp[p]) {
      adjacent[comp[p]].push_back(comp[p + 1]);
      adjacent[comp[p + 1]].push_back(comp[p]);
    }
    if (y + 1 < h && comp[p + w] != comp[p]) {
      adjacent[comp[p]].push_back(comp[p + w]);
      adjacent[comp[p + w]].push_back(comp[p]);
    }
  }
  for (auto& a : adjacent) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t c = 0; c < ncomp; ++c) {
      const std::size_t r = g.find(c);
      if (g.keep[r] || r != c) continue;
      std::size_t target = ncomp;
      double target_gap = 0;
      // Neighbours of every member of this group.
      for (std::size_t m = 0; m < ncomp; ++m) {
        if (g.find(m) != r) continue;
        for (std::size_t q : adjacent[m]) {
          const std::size_t rq = g.find(q);
          if (rq == r) continue;
          const double gap = std::fabs(g.mean(rq) - g.mean(r));
          if (target == ncomp || gap < target_gap || (gap == target_gap && g.size[rq] > g.size[target]) ||
              (gap == target_gap && g.size[rq] == g.size[target] && rq < target)) {
            target = rq;
            target_gap = gap;
          }
        }
      }
      if (target == ncomp) {
        g.keep[r] = 1;
      } else {
        g.merge_into(r, target);
      }
      changed = true;
    }
  }

  SuperpixelMap map;
  map.width = w;
  map.height = h;
  map.labels.resize(n);
  std::vector<std::uint32_t> relabel(ncomp, kUnset);
  std::uint32_t next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t r = g.find(comp[p]);
    if (relabel[r] == kUnset) relabel[r] = next++;
    map.labels[p] = relabel[r];
  }
  map.k = next;
  return map;
}

SuperpixelMap segment_slic(const Image& image, std::size_t target_k, double compactness) {
  SlicConfig cfg;
  cfg.target_k = target_k;
  cfg.compactness = compactness;
  return segment_slic(image, cfg);
}

}  // namespace datlime

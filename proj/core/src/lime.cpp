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

#include "datlime/lime.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>


#include "datlime/error.hpp"
#include "datlime/rng.hpp"
#include <nlohmann/json.hpp>

namespace datlime {

void ExplainConfig::validate() const {
  if (target_k_superpixels == 0) throw RangeError("target_k_superpixels must be at least 1");
  if (!(compactness > 0)) throw RangeError("compactness must be positive");
  if (n_samples == 0) throw RangeError("n_samples must be at least 1");
  if (!(p_off > 0 && p_off < 1)) throw RangeError("p_off must lie in (0, 1)");
  if (!(ridge_lambda >= 0) || !std::isfinite(ridge_lambda)) throw RangeError("ridge_lambda must be >= 0");
  if (!(kernel_width > 0)) throw RangeError("kernel_width must be positive");
  if (!std::isfinite(replacement_value)) throw RangeError("replacement_value must be finite");
}

Image perturb(const Image& image, const SuperpixelMap& map, std::span<const std::uint8_t> mask,
              float replacement_value) {
  if (mask.size() != map.k) throw ShapeError("mask length differs from superpixel count");
  if (image.width() != map.width || image.height() != map.height) throw ShapeError("image and map sizes differ");
  Image out = image;
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (!mask[map.labels[i]]) px[i] = replacement_value;
  }
  return out;
}

double cosine_distance(std::span<const std::uint8_t> mask) {
  if (mask.empty()) throw ShapeError("empty mask");
  std::size_t on = 0;
  for (auto b : mask) on += b ? 1 : 0;
  if (on == 0) return 1.0;
  // cos = on / (sqrt(on) * sqrt(k))
  return 1.0 - std::sqrt(static_cast<double>(on) / static_cast<double>(mask.size()));
}

double kernel_weight(std::span<const std::uint8_t> mask, const ProximityKernel& kernel) {
  const double d = cosine_distance(mask);
  return std::exp(-(d * d) / (kernel.width * kernel.width));
}

std::vector<Mask> exhaustive_masks(std::size_t k) {
  if (k == 0 || k > kMaxExhaustiveK) throw RangeError("exhaustive enumeration needs 1 <= k <= 16");
  const std::size_t n = std::size_t{1} << k;
  std::vector<Mask> out(n, Mask(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) out[i][j] = ((i >> j) & 1U) ? 0 : 1;
  }
  return out;
}

std::vector<Mask> random_masks(std::size_t k, std::size_t n, double p_off, std::uint64_t seed) {
  std::vector<Mask> out;
  if (n == 0) return out;
  out.reserve(n);
  out.emplace_back(k, 1);
  Rng rng(derive_seed(seed, 0x6c696d65ULL));
  for (std::size_t i = 1; i < n; ++i) {
    Mask m(k);
    for (auto& b : m) b = uniform01(rng) < p_off ? 0 : 1;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<PerturbationSample> sample_perturbations(const Image& image, const SuperpixelMap& map,
                                                     const BlackBoxClassifier& clf, const ExplainConfig& config) {
  config.validate();
  auto masks = config.exhaustive ? exhaustive_masks(map.k)
                                 : random_masks(map.k, config.n_samples, config.p_off, config.rng_seed);
  std::vector<PerturbationSample> out;
  out.reserve(masks.size());
  constexpr std::size_t kChunk = 128;
  std::vector<Image> batch;
  for (std::size_t start = 0; start < masks.size(); start += kChunk) {
    const std::size_t end = std::min(masks.size(), start + kChunk);
    batch.clear();
    for (std::size_t i = start; i < end; ++i) batch.push_back(perturb(image, map, masks[i], config.replacement_value));
    const auto probs = clf.predict_batch(batch);
    for (std::size_t i = start; i < end; ++i) out.push_back({std::move(masks[i]), probs[i - start]});
  }
  return out;
}

Surrogate fit_surrogate(std::span<const PerturbationSample> samples, const ProximityKernel& kernel, double lambda) {
  if (samples.empty()) throw ValidationError("fit_surrogate needs samples");
  if (!(lambda >= 0)) throw RangeError("lambda must be >= 0");
  const std::size_t k = samples.front().mask.size();
  const auto dim = static_cast<Eigen::Index>(k + 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd x(dim);
  for (const auto& s : samples) {
    if (s.mask.size() != k) throw ShapeError("samples have differing mask lengths");
    if (!(s.predicted_prob >= 0 && s.predicted_prob <= 1)) throw RangeError("sample probability outside [0, 1]");
    const double w = kernel_weight(s.mask, kernel);
    x(0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) x(static_cast<Eigen::Index>(j + 1)) = s.mask[j];
    A.selfadjointView<Eigen::Lower>().rankUpdate(x, w);
    b += w * s.predicted_prob * x;
  }
  A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
  for (Eigen::Index j = 1; j < dim; ++j) A(j, j) += lambda;

  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-12)) {
    throw RankError("surrogate normal equations are singular; add ridge penalty or more samples");
  }
  const Eigen::VectorXd beta = llt.solve(b);

  Surrogate out;
  out.intercept = beta(0);
  out.weights.assign(beta.data() + 1, beta.data() + dim);
  for (double v : out.weights) {
    if (!std::isfinite(v)) throw NumericError("surrogate coefficients are not finite");
  }
  double rss = 0;
  for (const auto& s : samples) {
    double pred = out.intercept;
    for (std::size_t j = 0; j < k; ++j) pred += s.mask[j] ? out.weights[j] : 0.0;
    const double r = s.predicted_prob - pred;
    rss += kernel_weight(s.mask, kernel) * r * r;
  }
  out.residual_norm = std::sqrt(rss);
  return out;
}

std::vector<RankedSuperpixel> rank_superpixels(const Surrogate& surrogate) {
  std::vector<RankedSuperpixel> out;
  for (std::size_t j = 0; j < surrogate.weights.size(); ++j) {
    const double w = surrogate.weights[j];
    out.push_back({static_cast<std::uint32_t>(j), w, w > 0 ? 1 : (w < 0 ? -1 : 0)});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedSuperpixel& a, const RankedSuperpixel& b) {
    return std::fabs(a.weight) > std::fabs(b.weight);
  });
  return out;
}

Explanation explain(const Image& image, const BlackBoxClassifier& clf, const ExplainConfig& config) {
  config.validate();
  Explanation e;
  e.config = config;
  e.map = segment_slic(image, SlicConfig{config.target_k_superpixels, config.compactness, 10});
  if (!config.exhaustive && config.n_samples < e.map.k + 1 && config.ridge_lambda == 0) {
    throw RankError("n_samples must exceed the superpixel count when ridge_lambda is 0");
  }
  const auto samples = sample_perturbations(image, e.map, clf, config);
  e.original_prob = samples.front().predicted_prob;
  e.surrogate = fit_surrogate(samples, ProximityKernel{config.kernel_width}, config.ridge_lambda);
  e.ranked = rank_superpixels(e.surrogate);
  if (e.ranked.size() > config.top_k_display) e.ranked.resize(config.top_k_display);
  return e;
}

std::vector<std::uint32_t> top_positive(const Surrogate& surrogate, std::size_t n) {
  std::vector<std::uint32_t> out;
  for (const auto& r : rank_superpixels(surrogate)) {
    if (out.size() == n) break;
    if (r.weight > 0) out.push_back(r.id);
  }
  return out;
}

RgbImage render_overlay(const Image& image, const Explanation& explanation, const SuperpixelMap& map) {
  if (image.width() != map.width || image.height() != map.height) throw ShapeError("image and map sizes differ");
  std::vector<int> tint(map.k, 0);
  for (const auto& r : explanation.ranked) {
    if (r.id >= map.k) throw RangeError("ranked superpixel id " + std::to_string(r.id) + " out of range");
    tint[r.id] = r.sign;
  }
  const std::size_t w = map.width, h = map.height;
  RgbImage out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto l = map.at(x, y);
      const bool edge = (x > 0 && map.at(x - 1, y) != l) || (x + 1 < w && map.at(x + 1, y) != l) ||
                        (y > 0 && map.at(x, y - 1) != l) || (y + 1 < h && map.at(x, y + 1) != l);
      const std::uint8_t g = quantize_unit(image.at(x, y));
      const auto base = static_cast<std::uint8_t>((g * 3) / 5);
      const auto lift = static_cast<std::uint8_t>(base + 102);
      auto& px = out.at(x, y);
      if (tint[l] > 0) {
        px = edge ? RgbImage::Pixel{0, 255, 0} : RgbImage::Pixel{base, lift, base};
      } else if (tint[l] < 0) {
        px = edge ? RgbImage::Pixel{255, 0, 0} : RgbImage::Pixel{lift, base, base};
      } else {
        px = edge ? RgbImage::Pixel{255, 255, 0} : RgbImage::Pixel{g, g, g};
      }
    }
  }
  return out;
}

std::string explanation_json(const Explanation& e, std::string_view provenance_json) {
  nlohmann::ordered_json j;
  if (!provenance_json.empty()) j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
  const auto& c = e.config;
  j["config"] = {{"target_k_superpixels", c.target_k_superpixels},
                 {"compactness", c.compactness},
                 {"n_samples", c.n_samples},
                 {"p_off", c.p_off},
                 {"ridge_lambda", c.ridge_lambda},
                 {"kernel_width", c.kernel_width},
                 {"top_k_display", c.top_k_display},
                 {"replacement_value", c.replacement_value},
                 {"rng_seed", c.rng_seed},
                 {"exhaustive", c.exhaustive}};
  j["realized_k"] = e.map.k;
  j["original_prob"] = e.original_prob;
  auto ranked = nlohmann::ordered_json::array();
  for (const auto& r : e.ranked) ranked.push_back({{"superpixel_id", r.id}, {"weight", r.weight}, {"sign", r.sign}});
  j["ranked"] = ranked;
  j["intercept"] = e.surrogate.intercept;
  j["weights"] = e.surrogate.weights;
  j["residual_norm"] = e.surrogate.residual_norm;
  return j.dump(2) + "\n";
}

}  // namespace datlime

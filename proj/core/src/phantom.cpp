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

#include "datlime/phantom.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "datlime/csv.hpp"
#include "datlime/error.hpp"
#include "datlime/rng.hpp"

namespace datlime {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Ellipsoid with its long (v) axis rotated in the axial plane.
struct Body {
  Vec3 center;
  Vec3 radii;        // along (u, v, w)
  double angle = 0;  // rotation of v away from +y toward +x
  float peak = 1.0f;

  // Normalized radius: 1 on the surface.
  double radius_at(double x, double y, double z) const {
    const double dx = x - center.x, dy = y - center.y, dz = z - center.z;
    const double s = std::sin(angle), c = std::cos(angle);
    const double u = dx * c - dy * s;
    const double v = dx * s + dy * c;
    const double nu = u / radii.x, nv = v / radii.y, nw = dz / radii.z;
    return std::sqrt(nu * nu + nv * nv + nw * nw);
  }

  double extent() const { return std::max({radii.x, radii.y, radii.z}); }
};

bool strictly_inside(const Vec3& p) {
  return p.x > 0.0 && p.x < kVolumeNx - 1.0 && p.y > 0.0 && p.y < kVolumeNy - 1.0 && p.z > 0.0 &&
         p.z < kVolumeNz - 1.0;
}

double putamen_angle(std::size_t hemisphere, const PhantomStyle& style) {
  const double a = style.putamen_tilt_deg * kPi / 180.0;
  return hemisphere == 0 ? -a : a;  // posterior end heads laterally
}

Body putamen_body(const PhantomSpec& spec, const PhantomStyle& style, std::size_t h, double shrink) {
  Body b;
  b.angle = putamen_angle(h, style);
  b.radii = style.putamen_radii;
  b.peak = static_cast<float>(style.striatal_peak * spec.intensity_scale);
  const double full = style.putamen_radii.y;
  const double kept = full * (1.0 - shrink);
  // Keep the anterior tip fixed; the posterior end retracts.
  const double pull = full - kept;
  b.radii.y = kept;
  b.center = spec.putamen_centers[h];
  b.center.x -= pull * std::sin(b.angle);
  b.center.y -= pull * std::cos(b.angle);
  return b;
}

Body caudate_body(const PhantomSpec& spec, const PhantomStyle& style, std::size_t h) {
  Body b;
  b.center = spec.caudate_centers[h];
  b.radii = style.caudate_radii;
  b.peak = style.striatal_peak;
  return b;
}

template <class Fn>
void for_each_in_box(const Body& body, double margin, Fn&& fn) {
  const double r = body.extent() * margin;
  auto lo = [&](double c) { return static_cast<long>(std::max(0.0, std::floor(c - r))); };
  auto hi = [&](double c, std::size_t n) { return static_cast<long>(std::min<double>(n - 1.0, std::ceil(c + r))); };
  for (long z = lo(body.center.z); z <= hi(body.center.z, kVolumeNz); ++z)
    for (long y = lo(body.center.y); y <= hi(body.center.y, kVolumeNy); ++y)
      for (long x = lo(body.center.x); x <= hi(body.center.x, kVolumeNx); ++x) fn(x, y, z);
}

}  // namespace

std::string_view to_string(ClassLabel label) { return label == ClassLabel::PD ? "PD" : "HC"; }

ClassLabel parse_label(std::string_view text) {
  std::string upper(text);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "PD" || upper == "1") return ClassLabel::PD;
  if (upper == "HC" || upper == "0") return ClassLabel::HC;
  throw FormatError("unknown class label '" + std::string(text) + "'");
}

void PhantomSpec::validate() const {
  for (const auto& c : caudate_centers)
    if (!strictly_inside(c)) throw GeometryError("caudate center outside the volume grid");
  for (const auto& c : putamen_centers)
    if (!strictly_inside(c)) throw GeometryError("putamen center outside the volume grid");
  if (!(intensity_scale > 0.0 && intensity_scale <= 1.0)) throw RangeError("intensity_scale must be in (0, 1]");
  if (!(putamen_shrink >= 0.0 && putamen_shrink < 1.0)) throw RangeError("putamen_shrink must be in [0, 1)");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw RangeError("noise_sigma must be >= 0");
  if (class_label == ClassLabel::HC && putamen_shrink != 0.0) throw RangeError("HC phantoms have putamen_shrink = 0");
  if (class_label == ClassLabel::PD && !(putamen_shrink > 0.0)) throw RangeError("PD phantoms need putamen_shrink > 0");
}

PhantomSpec PhantomSpec::healthy() {
  PhantomSpec s;
  s.caudate_centers = {Vec3{34.0, 44.0, 41.0}, Vec3{56.0, 44.0, 41.0}};
  s.putamen_centers = {Vec3{27.0, 58.0, 41.0}, Vec3{63.0, 58.0, 41.0}};
  return s;
}

Phantom generate_phantom(const PhantomSpec& spec, const PhantomStyle& style) {
  spec.validate();
  Phantom out{Volume(kVolumeNx, kVolumeNy, kVolumeNz), Volume(kVolumeNx, kVolumeNy, kVolumeNz)};
  Volume& vol = out.volume;

  const Vec3& bc = style.brain_center;
  const Vec3& br = style.brain_radii;
  for (std::size_t z = 0; z < kVolumeNz; ++z)
    for (std::size_t y = 0; y < kVolumeNy; ++y)
      for (std::size_t x = 0; x < kVolumeNx; ++x) {
        const double dx = (x - bc.x) / br.x, dy = (y - bc.y) / br.y, dz = (z - bc.z) / br.z;
        if (dx * dx + dy * dy + dz * dz <= 1.0) vol.at(x, y, z) = style.background_level;
      }

  const double margin = 1.0 + style.edge_width;
  auto paint = [&](const Body& body) {
    for_each_in_box(body, margin, [&](long x, long y, long z) {
      const double r = body.radius_at(x, y, z);
      if (r >= margin) return;
      float value = body.peak;
      if (r > 1.0) {
        const double t = (r - 1.0) / style.edge_width;  // 0 at surface, 1 at rim
        value = static_cast<float>(body.peak * (1.0 - t) + style.background_level * t);
      }
      float& voxel = vol.at(x, y, z);
      voxel = std::max(voxel, value);
    });
  };
  auto mark = [&](const Body& body) {
    for_each_in_box(body, 1.0, [&](long x, long y, long z) {
      if (body.radius_at(x, y, z) <= 1.0) out.roi_mask.at(x, y, z) = 1.0f;
    });
  };

  for (std::size_t h = 0; h < 2; ++h) {
    paint(caudate_body(spec, style, h));
    paint(putamen_body(spec, style, h, spec.putamen_shrink));
    mark(caudate_body(spec, style, h));
    mark(putamen_body(spec, style, h, 0.0));
  }

  if (spec.noise_sigma > 0.0) {
    Rng rng(spec.rng_seed);
    for (float& v : vol.voxels()) {
      v = static_cast<float>(std::clamp(v + spec.noise_sigma * standard_normal(rng), 0.0, 1.0));
    }
  }
  return out;
}

std::size_t LabeledVolumeSet::count(ClassLabel label) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const LabeledVolume& e) { return e.label == label; }));
}

std::vector<DatasetEntry> plan_dataset(std::size_t n_pd, std::size_t n_hc, std::uint64_t master_seed,
                                       const DatasetConfig& config) {
  std::vector<DatasetEntry> entries;
  entries.reserve(n_pd + n_hc);
  const PhantomSpec base = PhantomSpec::healthy();
  auto make = [&](ClassLabel label, std::size_t index) {
    const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(label), index);
    Rng rng(seed);
    PhantomSpec spec = base;
    spec.class_label = label;
    spec.rng_seed = derive_seed(seed, 0x6e6f697365ULL);
    auto jitter = [&](Vec3& p) {
      p.x += uniform(rng, -config.center_jitter, config.center_jitter);
      p.y += uniform(rng, -config.center_jitter, config.center_jitter);
      p.z += uniform(rng, -config.center_jitter, config.center_jitter);
    };
    for (auto& c : spec.caudate_centers) jitter(c);
    for (auto& c : spec.putamen_centers) jitter(c);
    if (label == ClassLabel::PD) {
      spec.putamen_shrink = uniform(rng, config.pd_shrink_low, config.pd_shrink_high);
      spec.intensity_scale = uniform(rng, config.pd_intensity_low, config.pd_intensity_high);
    } else {
      spec.putamen_shrink = 0.0;
      spec.intensity_scale = uniform(rng, config.hc_intensity_low, config.hc_intensity_high);
    }
    spec.noise_sigma = config.noise_sigma;
    spec.validate();

    char id[32];
    std::snprintf(id, sizeof id, "%s-%04zu", label == ClassLabel::PD ? "pd" : "hc", index);
    entries.push_back({id, label, spec});
  };
  for (std::size_t i = 0; i < n_pd; ++i) make(ClassLabel::PD, i);
  for (std::size_t i = 0; i < n_hc; ++i) make(ClassLabel::HC, i);
  return entries;
}

LabeledVolumeSet generate_dataset(std::size_t n_pd, std::size_t n_hc, std::uint64_t master_seed,
                                  const DatasetConfig& config, const PhantomStyle& style) {
  LabeledVolumeSet set;
  for (auto& entry : plan_dataset(n_pd, n_hc, master_seed, config)) {
    Volume volume = generate_phantom(entry.spec, style).volume;
    set.entries.push_back({std::move(entry.volume_id), entry.label, entry.spec, std::move(volume)});
  }
  return set;
}

std::uint32_t volume_checksum(const Volume& volume) {
  const auto bytes = encode_volume(volume);
  return static_cast<std::uint32_t>(crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

void write_dataset_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows,
                            std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "volume_id,label,path,shrink,seed\n";
  for (const auto& r : rows) {
    out << r.volume_id << ',' << to_string(r.label) << ',' << r.path << ',' << format_double(r.shrink) << ','
        << r.seed << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<ManifestRow> read_dataset_manifest(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c_id = t.column("volume_id"), c_label = t.column("label"), c_path = t.column("path"),
                    c_shrink = t.column("shrink"), c_seed = t.column("seed");
  std::vector<ManifestRow> rows;
  for (const auto& r : t.rows) {
    rows.push_back({r[c_id], parse_label(r[c_label]), r[c_path], parse_double(r[c_shrink]), parse_uint(r[c_seed])});
  }
  return rows;
}

}  // namespace datlime

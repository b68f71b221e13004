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

#include <algorithm>
#include <map>

#include "datlime/error.hpp"
#include "datlime/phantom.hpp"

namespace datlime {
namespace {

double masked_mean(const Volume& v, const Volume& mask) {
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (mask.voxels()[i] > 0.5f) sum += v.voxels()[i], ++n;
  return sum / static_cast<double>(n);
}

TEST(Phantom, SeededDeterminism) {
  auto spec = PhantomSpec::healthy();
  spec.noise_sigma = 0.05;
  spec.rng_seed = 123;
  const auto a = generate_phantom(spec);
  const auto b = generate_phantom(spec);
  EXPECT_EQ(a.volume, b.volume);
  EXPECT_EQ(a.roi_mask, b.roi_mask);
  EXPECT_EQ(a.volume.nx(), kVolumeNx);
  EXPECT_EQ(a.volume.ny(), kVolumeNy);
  EXPECT_EQ(a.volume.nz(), kVolumeNz);
}

TEST(Phantom, ParkinsonianRoiIsDimmer) {
  const auto hc_spec = PhantomSpec::healthy();
  auto pd_spec = hc_spec;
  pd_spec.class_label = ClassLabel::PD;
  pd_spec.putamen_shrink = 0.5;
  const auto hc = generate_phantom(hc_spec);
  const auto pd = generate_phantom(pd_spec);
  EXPECT_EQ(hc.roi_mask, pd.roi_mask);
  EXPECT_LT(masked_mean(pd.volume, pd.roi_mask), masked_mean(hc.volume, hc.roi_mask));
}

TEST(Phantom, PeakEqualsStriatalPeak) {
  const auto p = generate_phantom(PhantomSpec::healthy());
  EXPECT_EQ(*std::max_element(p.volume.voxels().begin(), p.volume.voxels().end()), PhantomStyle{}.striatal_peak);
  PhantomStyle style;
  style.striatal_peak = 3.5f;
  const auto q = generate_phantom(PhantomSpec::healthy(), style);
  EXPECT_EQ(*std::max_element(q.volume.voxels().begin(), q.volume.voxels().end()), 3.5f);
}

TEST(Phantom, NonNegativeAndMaskIsBinary) {
  auto spec = PhantomSpec::healthy();
  spec.noise_sigma = 0.2;
  spec.rng_seed = 4;
  const auto p = generate_phantom(spec);
  for (float v : p.volume.voxels()) EXPECT_GE(v, 0.0f);
  for (float v : p.roi_mask.voxels()) EXPECT_TRUE(v == 0.0f || v == 1.0f);
}

TEST(Phantom, InvalidSpecs) {
  auto spec = PhantomSpec::healthy();
  spec.caudate_centers[0].x = -3;
  EXPECT_THROW(generate_phantom(spec), GeometryError);
  spec = PhantomSpec::healthy();
  spec.putamen_shrink = 0.3;  // HC with shrink
  EXPECT_THROW(spec.validate(), RangeError);
  spec = PhantomSpec::healthy();
  spec.noise_sigma = -1;
  EXPECT_THROW(spec.validate(), RangeError);
}

TEST(Dataset, ReferenceCohortSizesPlan) {
  const auto plan = plan_dataset(kCohortPdCount, kCohortHcCount, 7);
  EXPECT_EQ(plan.size(), 642u);
  EXPECT_EQ(std::count_if(plan.begin(), plan.end(), [](const auto& e) { return e.label == ClassLabel::PD; }), 430);
  for (const auto& e : plan) EXPECT_NO_THROW(e.spec.validate());
  EXPECT_EQ(plan.front().volume_id, "pd-0000");
  EXPECT_EQ(plan.back().volume_id, "hc-0211");
}

TEST(Dataset, EmptyAndDeterministic) {
  EXPECT_TRUE(generate_dataset(0, 0, 1).entries.empty());
  auto checksums = [] {
    std::map<std::string, std::uint32_t> out;
    for (const auto& e : generate_dataset(5, 5, 99).entries) out[e.volume_id] = volume_checksum(e.volume);
    return out;
  };
  const auto a = checksums();
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a, checksums());
}

TEST(Dataset, ManifestRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "datlime_phantom";
  std::filesystem::create_directories(dir);
  const std::vector<ManifestRow> rows{{"pd-0000", ClassLabel::PD, "volumes/pd-0000.svol", 0.42, 17},
                                      {"hc-0000", ClassLabel::HC, "volumes/hc-0000.svol", 0.0, 18}};
  write_dataset_manifest(dir / "manifest.csv", rows, "seed=1");
  const auto back = read_dataset_manifest(dir / "manifest.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].volume_id, "pd-0000");
  EXPECT_EQ(back[0].label, ClassLabel::PD);
  EXPECT_EQ(back[0].shrink, 0.42);
  EXPECT_EQ(back[1].seed, 18u);
}

TEST(Labels, Parsing) {
  EXPECT_EQ(parse_label("pd"), ClassLabel::PD);
  EXPECT_EQ(parse_label("0"), ClassLabel::HC);
  EXPECT_THROW(parse_label("maybe"), FormatError);
}

}  // namespace
}  // namespace datlime

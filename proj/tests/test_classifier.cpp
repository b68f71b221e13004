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

#include <filesystem>

#include "datlime/classifier.hpp"
#include "datlime/csv.hpp"
#include "datlime/error.hpp"
#include "datlime/network.hpp"

namespace datlime {
namespace {

Network small_model() {
  Network net(InputShape{1, 16, 16}, {LayerSpec::conv2d(2), LayerSpec::relu(), LayerSpec::max_pool(),
                                      LayerSpec::dense(1), LayerSpec::sigmoid()});
  net.init_he_uniform(3);
  return net;
}

TEST(ModelClassifier, EmptyBatch) {
  const ModelClassifier clf(small_model());
  EXPECT_TRUE(clf.predict_batch(std::vector<Image>{}).empty());
}

TEST(ModelClassifier, BatchEqualsSinglePredictions) {
  const ModelClassifier clf(small_model(), 3);
  std::vector<Image> images;
  for (int i = 0; i < 7; ++i) {
    Image im(16, 16);
    for (std::size_t p = 0; p < im.size(); ++p) im.pixels()[p] = static_cast<float>((p * (i + 3)) % 17) / 17.0f;
    images.push_back(im);
  }
  images.push_back(images[2]);
  const auto batch = clf.predict_batch(images);
  ASSERT_EQ(batch.size(), images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    EXPECT_EQ(batch[i], clf.predict(images[i]));
    EXPECT_GE(batch[i], 0.0);
    EXPECT_LE(batch[i], 1.0);
  }
  EXPECT_EQ(batch[2], batch.back());
}

TEST(ModelClassifier, ZeroImageIsStableAndInRange) {
  const ModelClassifier clf(small_model());
  const Image zero(16, 16);
  const double a = clf.predict(zero);
  EXPECT_GE(a, 0.0);
  EXPECT_LE(a, 1.0);
  EXPECT_EQ(a, clf.predict(zero));
}

TEST(ModelClassifier, DimensionMismatch) {
  const ModelClassifier clf(small_model());
  EXPECT_THROW(clf.predict(Image(8, 16)), ShapeError);
}

TEST(FunctionClassifier, RejectsOutOfRange) {
  const FunctionClassifier bad([](const Image&) { return 1.5; });
  EXPECT_THROW(bad.predict(Image(2, 2)), RangeError);
}

TEST(ManifestClassifier, Lookup) {
  PredictionManifest m;
  m.probabilities["a"] = 0.9;
  const auto clf = manifest_classifier(m);
  EXPECT_EQ(clf.predict("a"), 0.9);
  EXPECT_THROW(clf.predict("b"), MissingIdError);
  const std::vector<std::string> ids{"a", "a"};
  EXPECT_EQ(clf.predict_batch(ids), (std::vector<double>{0.9, 0.9}));
}

TEST(ManifestClassifier, RejectsOutOfRangeAtLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "datlime_manifest";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "bad.csv", "id,probability\na,1.2\n");
  EXPECT_THROW(read_prediction_manifest(dir / "bad.csv"), RangeError);
  write_text_file(dir / "dup.csv", "id,probability\na,0.1\na,0.2\n");
  EXPECT_THROW(read_prediction_manifest(dir / "dup.csv"), ValidationError);

  PredictionManifest m;
  m.probabilities = {{"x", 0.25}, {"y", 1.0}};
  write_prediction_manifest(dir / "ok.csv", m, "seed=1");
  EXPECT_EQ(read_prediction_manifest(dir / "ok.csv").probabilities, m.probabilities);

  PredictionManifest bad;
  bad.probabilities["z"] = 1.2;
  EXPECT_THROW(ManifestClassifier{bad}, RangeError);
}

}  // namespace
}  // namespace datlime

// Copyright 2026 The IrisStyle Authors. All rights reserved.
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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "helpers.hpp"
#include "iristyle/data/cache.hpp"
#include "iristyle/data/manifest.hpp"
#include "iristyle/data/synthetic.hpp"
#include "iristyle/features/stats.hpp"
#include "iristyle/io/png.hpp"

namespace fs = std::filesystem;
using namespace iristyle;

TEST_SUITE_BEGIN("data");

TEST_CASE("synthetic corpus: all classes present, glints saturated, deterministic") {
  SyntheticConfig config;
  config.n_users = 3;
  config.samples_per_user = 2;
  config.height = 96;
  config.width = 128;

  const auto s1 = render_synthetic_eye(0, 0, config);
  const auto s2 = render_synthetic_eye(0, 0, config);
  CHECK(s1.image.pixels == s2.image.pixels);  // bit-identical
  CHECK(s1.mask.labels == s2.mask.labels);

  std::set<int> classes;
  for (Eigen::Index i = 0; i < s1.mask.labels.size(); ++i)
    classes.insert(s1.mask.labels.data()[i]);
  CHECK(classes == std::set<int>{0, 1, 2, 3});

  // exactly the two glint discs exceed the default threshold, on iris pixels
  int saturated = 0;
  for (Eigen::Index y = 0; y < s1.image.height(); ++y)
    for (Eigen::Index x = 0; x < s1.image.width(); ++x)
      if (s1.image.pixels(y, x) >= 250) {
        ++saturated;
        CHECK(s1.mask.labels(y, x) == kClassIris);
      }
  CHECK(saturated > 0);
  CHECK(s1.gaze.vector.norm() == doctest::Approx(1.0).epsilon(1e-9));

  const auto other_user = render_synthetic_eye(1, 0, config);
  CHECK((other_user.image.pixels != s1.image.pixels));
}

TEST_CASE("generate + load round trip with per-user split arithmetic") {
  const auto dir = testing::scratch_dir("corpus");
  SyntheticConfig config;
  config.n_users = 4;
  config.samples_per_user = 5;
  config.height = 80;
  config.width = 112;
  config.seed = 9;
  const auto generated = generate_synthetic_corpus(config, dir);
  CHECK(generated.records.size() == 20);
  CHECK(generated.num_classes() == 4);

  const auto manifest = load_recognition_dataset(dir, 0.2, 42);
  CHECK(manifest.records.size() == 20);
  CHECK(manifest.num_classes() == 4);
  CHECK(manifest.split_records(Split::kTest).size() == 4);    // round(0.2*5)=1 per user
  CHECK(manifest.split_records(Split::kTrain).size() == 16);

  std::map<std::string, std::pair<int, int>> per_user;  // user -> (train, test)
  for (const auto& rec : manifest.records) {
    CHECK(rec.gaze.has_value());
    CHECK(rec.gaze->vector.norm() == doctest::Approx(1.0).epsilon(1e-4));
    auto& [train, test] = per_user[rec.user_id];
    (rec.split == Split::kTest ? test : train) += 1;
  }
  for (const auto& [user, counts] : per_user) {
    CHECK(counts.first == 4);
    CHECK(counts.second == 1);
  }

  // identical inputs -> identical manifests
  const auto manifest2 = load_recognition_dataset(dir, 0.2, 42);
  REQUIRE(manifest2.records.size() == manifest.records.size());
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    CHECK(manifest.records[i].record_id == manifest2.records[i].record_id);
    CHECK(manifest.records[i].split == manifest2.records[i].split);
    CHECK(manifest.records[i].class_index == manifest2.records[i].class_index);
  }

  // a different seed moves at least one record across the split
  const auto manifest3 = load_recognition_dataset(dir, 0.2, 43);
  bool any_moved = false;
  for (std::size_t i = 0; i < manifest.records.size(); ++i)
    any_moved = any_moved || manifest.records[i].split != manifest3.records[i].split;
  CHECK(any_moved);
  fs::remove_all(dir);
}

TEST_CASE("generate twice -> byte-identical image files") {
  const auto d1 = testing::scratch_dir("corpus-a");
  const auto d2 = testing::scratch_dir("corpus-b");
  SyntheticConfig config;
  config.n_users = 2;
  config.samples_per_user = 2;
  config.height = 64;
  config.width = 64;
  generate_synthetic_corpus(config, d1);
  generate_synthetic_corpus(config, d2);
  for (const auto& entry : fs::recursive_directory_iterator(d1)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), d1);
    std::ifstream a(entry.path(), std::ios::binary), b(d2 / rel, std::ios::binary);
    const std::string ba((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string bb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(ba == bb);
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("users with a single sample are dropped; too few users is an error") {
  const auto dir = testing::scratch_dir("filter");
  SyntheticConfig config;
  config.n_users = 3;
  config.samples_per_user = 3;
  config.height = 64;
  config.width = 64;
  generate_synthetic_corpus(config, dir);
  // orphan one user down to a single sample
  fs::remove(dir / "images" / "u002_s001.png");
  fs::remove(dir / "images" / "u002_s002.png");
  fs::remove(dir / "labels" / "u002_s001.png");
  fs::remove(dir / "labels" / "u002_s002.png");

  const auto manifest = load_recognition_dataset(dir, 0.3, 1);
  CHECK(manifest.num_classes() == 2);
  for (const auto& rec : manifest.records) CHECK(rec.user_id != "u002");

  // removing masks must name the offending record
  fs::remove(dir / "labels" / "u001_s000.png");
  CHECK_THROWS_WITH_AS((void)load_recognition_dataset(dir, 0.3, 1),
                       doctest::Contains("u001_s000"), Error);
  fs::remove_all(dir);
}

TEST_CASE("gaze dataset loader keeps the original partition and demands labels") {
  const auto dir = testing::scratch_dir("gaze");
  ImageU8 frame(40, 40);
  frame.setConstant(100);
  for (const std::string split : {"train", "test"}) {
    fs::create_directories(dir / split / "sequences" / "S1");
    fs::create_directories(dir / split / "labels");
    write_png_gray((dir / split / "sequences" / "S1" / "000.png").string(), frame);
    write_png_gray((dir / split / "sequences" / "S1" / "001.png").string(), frame);
    std::ofstream(dir / split / "labels" / "S1.txt")
        << "000 0.1 -0.2 0.97\n001 0 0 2\n";
  }
  const auto manifest = load_gaze_dataset(dir);
  CHECK(manifest.records.size() == 4);
  int train = 0, test = 0;
  for (const auto& rec : manifest.records) {
    REQUIRE(rec.gaze.has_value());
    CHECK(rec.gaze->vector.norm() == doctest::Approx(1.0).epsilon(1e-4));
    (rec.split == Split::kTest ? test : train) += 1;
  }
  CHECK(train == 2);
  CHECK(test == 2);

  // a frame without a gaze line is an error
  write_png_gray((dir / "train" / "sequences" / "S1" / "002.png").string(), frame);
  CHECK_THROWS_AS((void)load_gaze_dataset(dir), Error);

  CHECK_THROWS_AS((void)load_gaze_dataset(dir / "nowhere"), Error);
  fs::remove_all(dir);
}

TEST_CASE("feature cache: round trip, not-found, and length validation") {
  FeatureCache cache;
  CHECK(cache.kind_dimension(kStyleFeatureKind) == 1920);
  CHECK(cache.kind_dimension(kCnnFeatureKind) == 25088);

  VectorX<float> vec = VectorX<float>::LinSpaced(1920, 0.f, 1.f);
  cache.put("rec1", kStyleFeatureKind, "none", vec);
  const auto got = cache.get("rec1", kStyleFeatureKind, "none");
  REQUIRE(got.has_value());
  CHECK(*got == vec);
  CHECK_FALSE(cache.get("rec1", kStyleFeatureKind, "rot:90").has_value());
  CHECK_FALSE(cache.get("other", kStyleFeatureKind, "none").has_value());

  CHECK_THROWS_AS(cache.put("rec1", kStyleFeatureKind, "none", VectorX<float>::Zero(1921)),
                  Error);
  CHECK_THROWS_AS((void)cache.kind_dimension("no-such-kind"), Error);

  const auto dir = testing::scratch_dir("cache");
  cache.register_kind("tiny", 4);
  cache.put("a", "tiny", "none", VectorX<float>::Constant(4, 2.f));
  cache.put("b", "tiny", "v1", VectorX<float>::Constant(4, 3.f));
  cache.save(dir);
  cache.save(dir);  // idempotent

  const FeatureCache loaded = FeatureCache::load(dir);
  CHECK(loaded.size("tiny") == 2);
  CHECK(loaded.get("b", "tiny", "v1")->isApprox(VectorX<float>::Constant(4, 3.f)));
  CHECK((*loaded.get("rec1", kStyleFeatureKind, "none")) == vec);
  fs::remove_all(dir);
}

TEST_CASE("different users separate in style-feature space") {
  SyntheticConfig config;
  config.n_users = 4;
  config.samples_per_user = 3;
  config.height = 96;
  config.width = 128;
  const Backbone<float> bb(vgg19_topology(), make_random_weights(vgg19_topology(), 42), 64);

  std::vector<std::vector<VectorX<float>>> features(4);
  for (int user = 0; user < 4; ++user)
    for (int sample = 0; sample < 3; ++sample) {
      const auto rendered = render_synthetic_eye(user, sample, config);
      const auto crop = extract_iris<float>(rendered.image, rendered.mask, 250);
      features[static_cast<std::size_t>(user)].push_back(style_feature(bb, crop));
    }

  double within = 0, between = 0;
  int within_n = 0, between_n = 0;
  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (u == v && i >= j) continue;
          const double d = (features[u][i] - features[v][j]).norm();
          if (u == v) {
            within += d;
            ++within_n;
          } else {
            between += d;
            ++between_n;
          }
        }
  within /= within_n;
  between /= between_n;
  CHECK(between > within);
}

TEST_SUITE_END();

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

#include <numeric>

#include "helpers.hpp"
#include "iristyle/features/stats.hpp"

using namespace iristyle;

namespace {

Backbone<float>& small_backbone() {
  static Backbone<float> bb(vgg19_topology(), make_random_weights(vgg19_topology(), 42), 64);
  return bb;
}

// Brute-force double-loop reference for the channel statistics.
void oracle_stats(const FeatureMap<double>& map, VectorX<double>& mean,
                  VectorX<double>& stddev) {
  const Eigen::Index hw = map.values.rows(), n = map.values.cols();
  mean.resize(n);
  stddev.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    double sum = 0;
    for (Eigen::Index p = 0; p < hw; ++p) sum += map.values(p, c);
    const double mu = sum / static_cast<double>(hw);
    double acc = 0;
    for (Eigen::Index p = 0; p < hw; ++p) {
      const double d = map.values(p, c) - mu;
      acc += d * d;
    }
    mean(c) = mu;
    stddev(c) = std::sqrt(acc / static_cast<double>(hw) + kStatsEpsilon);
  }
}

// Values on a dyadic grid so sums are exact in double regardless of order.
FeatureMap<float> quantized_map(Eigen::Index hw, Eigen::Index channels, Rng& rng) {
  FeatureMap<float> map;
  map.values.resize(hw, channels);
  map.height = static_cast<int>(hw);
  map.width = 1;
  for (Eigen::Index i = 0; i < map.values.size(); ++i)
    map.values.data()[i] = static_cast<float>(rng.uniform_index(1 << 16)) / float(1 << 14);
  return map;
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("channel_stats hand case: [[1,3],[5,7]] -> mean 4, stddev sqrt(5)") {
  FeatureMap<double> map;
  map.values.resize(4, 1);
  map.values << 1, 3, 5, 7;
  map.height = 2;
  map.width = 2;
  const auto stats = channel_stats(map);
  CHECK(stats.mean(0) == 4.0);
  CHECK(stats.stddev(0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-5));
  CHECK(stats.stddev(0) == std::sqrt(5.0 + kStatsEpsilon));
}

TEST_CASE("channel_stats of a constant map is (c, sqrt(eps))") {
  FeatureMap<double> map;
  map.values = MatrixX<double>::Constant(35, 3, 2.5);
  map.height = 5;
  map.width = 7;
  const auto stats = channel_stats(map);
  for (int c = 0; c < 3; ++c) {
    CHECK(stats.mean(c) == 2.5);
    CHECK(stats.stddev(c) == doctest::Approx(1e-4).epsilon(1e-9));
  }
}

TEST_CASE("channel_stats matches the double-loop oracle on random maps") {
  Rng rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.uniform_index(8));
    const Eigen::Index h = 1 + static_cast<Eigen::Index>(rng.uniform_index(16));
    const Eigen::Index w = 1 + static_cast<Eigen::Index>(rng.uniform_index(16));
    FeatureMap<double> map;
    map.values.resize(h * w, n);
    map.height = static_cast<int>(h);
    map.width = static_cast<int>(w);
    for (Eigen::Index i = 0; i < map.values.size(); ++i)
      map.values.data()[i] = rng.uniform(0.0, 4.0);
    VectorX<double> mu, sd;
    oracle_stats(map, mu, sd);
    const auto stats = channel_stats(map);
    CHECK((stats.mean - mu).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((stats.stddev - sd).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("style features are exactly invariant to spatial shuffles") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FeatureMap<float>> maps;
    maps.push_back(quantized_map(64, 4, rng));
    maps.push_back(quantized_map(100, 2, rng));
    const VectorX<float> base = style_feature_from_maps(maps);

    std::vector<int> perm(64);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<FeatureMap<float>> shuffled = maps;
    for (int p = 0; p < 64; ++p)
      shuffled[0].values.row(p) = maps[0].values.row(perm[static_cast<std::size_t>(p)]);

    const VectorX<float> permuted = style_feature_from_maps(shuffled);
    CHECK(base == permuted);  // bitwise
  }
}

TEST_CASE("style feature length is 1920 for any crop size") {
  const auto& bb = small_backbone();
  for (auto [h, w] : {std::pair{64, 64}, std::pair{150, 150}, std::pair{300, 280}}) {
    IrisCrop<float> crop;
    Rng rng(static_cast<std::uint64_t>(h * w));
    crop.pixels.resize(h, w);
    for (Eigen::Index i = 0; i < crop.pixels.size(); ++i)
      crop.pixels.data()[i] = static_cast<float>(rng.uniform());
    crop.bbox = {0, 0, h, w};
    const VectorX<float> feat = style_feature(bb, crop);
    CHECK(feat.size() == 1920);
  }
}

TEST_CASE("style features are deterministic and non-negative where required") {
  const auto eye = testing::make_tiny_eye();
  const auto crop = extract_iris<float>(eye.image, eye.mask, 250);
  const auto& bb = small_backbone();
  const VectorX<float> f1 = style_feature(bb, crop);
  const VectorX<float> f2 = style_feature(bb, crop);
  CHECK((f1 - f2).cwiseAbs().maxCoeff() <= 1e-6f);
  CHECK(f1.minCoeff() >= 0.0f);  // post-rectification means and stddevs
}

TEST_CASE("cnn feature length tracks the input size") {
  const auto eye = testing::make_tiny_eye();
  const auto crop = extract_iris<float>(eye.image, eye.mask, 250);
  const auto& bb = small_backbone();
  // 512 * ceil(S/32)^2 at the final encoding
  CHECK(cnn_feature(bb, crop, 224).size() == 25088);
  CHECK(cnn_feature(bb, crop, 64).size() == 512 * 2 * 2);
}

TEST_SUITE_END();

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

#ifndef IRISTYLE_FEATURES_STATS_HPP_
#define IRISTYLE_FEATURES_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iristyle/backbone/backbone.hpp"
#include "iristyle/backbone/net.hpp"
#include "iristyle/common.hpp"
#include "iristyle/imaging/iris.hpp"

namespace iristyle {

/// Shared stabilizer inside the standard-deviation square root. Keeps the
/// statistic and the style-loss gradient defined on dead (all-zero) channels.
inline constexpr double kStatsEpsilon = 1e-8;

template <typename Scalar>
struct ChannelStats {
  VectorX<Scalar> mean;    // mu_i  = 1/(HW) sum_jk F_ijk
  VectorX<Scalar> stddev;  // sigma_i = sqrt(1/(HW) sum_jk (F_ijk - mu_i)^2 + eps)
};

/// Population channel statistics of an activation map. Sums are accumulated
/// in double via the moment form (E[x^2] - E[x]^2), which keeps the result a
/// function of the value multiset alone, so spatial permutations cannot move
/// the statistics.
template <typename Scalar>
ChannelStats<Scalar> channel_stats(const FeatureMap<Scalar>& map) {
  require(map.values.rows() >= 1 && map.values.cols() >= 1,
          "channel_stats needs a nonempty map");
  const Eigen::Index n = map.values.rows();
  ChannelStats<Scalar> stats;
  stats.mean.resize(map.values.cols());
  stats.stddev.resize(map.values.cols());
  for (Eigen::Index c = 0; c < map.values.cols(); ++c) {
    const Scalar* v = map.values.col(c).data();
    double sum = 0.0, sum_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = static_cast<double>(v[i]);
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
    stats.mean(c) = static_cast<Scalar>(mean);
    stats.stddev(c) = static_cast<Scalar>(std::sqrt(var + kStatsEpsilon));
  }
  return stats;
}

/// Style vector from already-computed activation maps: per map, all channel
/// means then all standard deviations, maps concatenated in order.
template <typename Scalar>
VectorX<Scalar> style_feature_from_maps(const std::vector<FeatureMap<Scalar>>& maps) {
  Eigen::Index total = 0;
  for (const auto& m : maps) total += 2 * m.values.cols();
  VectorX<Scalar> out(total);
  Eigen::Index at = 0;
  for (const auto& m : maps) {
    const auto stats = channel_stats(m);
    out.segment(at, stats.mean.size()) = stats.mean;
    at += stats.mean.size();
    out.segment(at, stats.stddev.size()) = stats.stddev;
    at += stats.stddev.size();
  }
  return out;
}

inline std::size_t style_feature_length(const std::vector<int>& tap_channels) {
  std::size_t n = 0;
  for (int c : tap_channels) n += 2 * static_cast<std::size_t>(c);
  return n;
}

/// The style descriptor: per-tap channel means then standard deviations,
/// concatenated over the taps in order. 1,920 entries for the default taps,
/// independent of the crop size.
template <typename Scalar>
VectorX<Scalar> style_feature(const Backbone<Scalar>& backbone, const IrisCrop<Scalar>& crop,
                              const std::vector<std::string>& taps = default_style_taps(),
                              int input_size = 0) {
  require(!taps.empty(), "style_feature needs at least one tap");
  const int s = input_size > 0 ? input_size : backbone.input_size();
  const MatrixX<Scalar> prepared = backbone.prepare_input(crop, s);
  const auto fwd = backbone.net().forward(prepared, s, s, taps);
  std::vector<FeatureMap<Scalar>> maps;
  maps.reserve(taps.size());
  for (const auto& tap : taps) maps.push_back(backbone.net().tap_feature_map(fwd, tap));
  return style_feature_from_maps(maps);
}

/// The conventional feed-forward embedding: flattened activations at the last
/// encoding layer. 25,088 entries at the canonical 224x224 input.
template <typename Scalar>
VectorX<Scalar> cnn_feature(const Backbone<Scalar>& backbone, const IrisCrop<Scalar>& crop,
                            int input_size = kDefaultInputSize) {
  const MatrixX<Scalar> prepared = backbone.prepare_input(crop, input_size);
  const std::vector<std::string> taps = {kFinalEncodingTap};
  const auto fwd = backbone.net().forward(prepared, input_size, input_size, taps);
  return flatten_feature_map(backbone.net().tap_feature_map(fwd, kFinalEncodingTap));
}

}  // namespace iristyle

#endif  // IRISTYLE_FEATURES_STATS_HPP_

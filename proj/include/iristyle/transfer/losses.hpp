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

#ifndef IRISTYLE_TRANSFER_LOSSES_HPP_
#define IRISTYLE_TRANSFER_LOSSES_HPP_

#include <vector>

#include "iristyle/backbone/net.hpp"
#include "iristyle/common.hpp"
#include "iristyle/features/stats.hpp"

namespace iristyle {

/// Mean squared error between two activation maps of identical shape.
template <typename Scalar>
Scalar content_loss(const FeatureMap<Scalar>& ref, const FeatureMap<Scalar>& x) {
  require(ref.values.rows() == x.values.rows() && ref.values.cols() == x.values.cols(),
          "content loss shape mismatch");
  return (ref.values - x.values).squaredNorm() / static_cast<Scalar>(ref.values.size());
}

/// Content loss plus d(loss)/d(x activations).
template <typename Scalar>
Scalar content_loss_grad(const FeatureMap<Scalar>& ref, const FeatureMap<Scalar>& x,
                         MatrixX<Scalar>& grad) {
  require(ref.values.rows() == x.values.rows() && ref.values.cols() == x.values.cols(),
          "content loss shape mismatch");
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(ref.values.size());
  grad = Scalar(2) * inv_n * (x.values - ref.values);
  return (ref.values - x.values).squaredNorm() * inv_n;
}

/// Per-tap statistics alignment: 1/N sum_i ((mu_S - mu_X)^2 + (sigma_S - sigma_X)^2).
template <typename Scalar>
Scalar style_loss_tap(const ChannelStats<Scalar>& ref, const ChannelStats<Scalar>& x) {
  require(ref.mean.size() == x.mean.size(), "style loss channel mismatch");
  return ((ref.mean - x.mean).squaredNorm() + (ref.stddev - x.stddev).squaredNorm()) /
         static_cast<Scalar>(ref.mean.size());
}

/// Weighted multi-tap style loss.
template <typename Scalar>
Scalar style_loss(const std::vector<ChannelStats<Scalar>>& ref,
                  const std::vector<ChannelStats<Scalar>>& x,
                  const VectorX<Scalar>& tap_weights) {
  require(ref.size() == x.size() &&
              static_cast<Eigen::Index>(ref.size()) == tap_weights.size(),
          "style loss tap count mismatch");
  Scalar total = 0;
  for (std::size_t l = 0; l < ref.size(); ++l)
    total += tap_weights(static_cast<Eigen::Index>(l)) * style_loss_tap(ref[l], x[l]);
  return total;
}

/// Per-tap style loss plus d(loss)/d(x activations). The sigma term uses the
/// stabilized standard deviation, so the gradient stays finite on constant
/// channels.
template <typename Scalar>
Scalar style_loss_tap_grad(const ChannelStats<Scalar>& ref, const FeatureMap<Scalar>& x_map,
                           MatrixX<Scalar>& grad) {
  const ChannelStats<Scalar> x = channel_stats(x_map);
  require(ref.mean.size() == x.mean.size(), "style loss channel mismatch");
  const Scalar n = static_cast<Scalar>(x.mean.size());
  const Scalar hw = static_cast<Scalar>(x_map.values.rows());

  // d/dF of mu term: 2(mu_X - mu_S) / (N*HW), constant per channel.
  // d/dF of sigma term: 2(sigma_X - sigma_S) * (F - mu_X) / (N*HW*sigma_X).
  const VectorX<Scalar> mu_coeff = Scalar(2) / (n * hw) * (x.mean - ref.mean);
  const VectorX<Scalar> sd_coeff = (Scalar(2) / (n * hw) * (x.stddev - ref.stddev).array() /
                                    x.stddev.array())
                                       .matrix();
  grad = (x_map.values.rowwise() - x.mean.transpose()) * sd_coeff.asDiagonal();
  grad.rowwise() += mu_coeff.transpose();
  return style_loss_tap(ref, x);
}

}  // namespace iristyle

#endif  // IRISTYLE_TRANSFER_LOSSES_HPP_

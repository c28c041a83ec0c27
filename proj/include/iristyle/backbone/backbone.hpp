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

#ifndef IRISTYLE_BACKBONE_BACKBONE_HPP_
#define IRISTYLE_BACKBONE_BACKBONE_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "iristyle/backbone/net.hpp"
#include "iristyle/backbone/weights.hpp"
#include "iristyle/imaging/iris.hpp"

namespace iristyle {

inline constexpr float kInputMean[3] = {0.485f, 0.456f, 0.406f};
inline constexpr float kInputStd[3] = {0.229f, 0.224f, 0.225f};
inline constexpr int kDefaultInputSize = 224;

/// Default style taps: first activation of each of the first four blocks.
inline const std::vector<std::string>& default_style_taps() {
  static const std::vector<std::string> taps = {"relu1_1", "relu2_1", "relu3_1",
                                                "relu4_1"};
  return taps;
}
inline constexpr const char* kContentTap = "relu4_2";
inline constexpr const char* kFinalEncodingTap = "final_encoding";

/// Differentiable map from a single-plane crop in [0,1] to the network input:
/// bilinear stretch to size x size, the gray plane replicated over 3 channels,
/// then the canonical per-channel normalization of the pre-trained weights.
template <typename Scalar>
class InputPipeline {
 public:
  InputPipeline(int src_height, int src_width, int size)
      : src_h_(src_height), src_w_(src_width), size_(size) {
    require(size >= 32, "backbone input size must be >= 32");
    require(src_height >= 1 && src_width >= 1, "empty crop");
    const auto tx = axis_taps(size, src_width);
    const auto ty = axis_taps(size, src_height);
    const Eigen::Index n = static_cast<Eigen::Index>(size) * size;
    idx_.resize(n, 4);
    wgt_.resize(n, 4);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const Eigen::Index p = static_cast<Eigen::Index>(y) * size + x;
        idx_(p, 0) = static_cast<Eigen::Index>(ty[y].lo) * src_w_ + tx[x].lo;
        idx_(p, 1) = static_cast<Eigen::Index>(ty[y].lo) * src_w_ + tx[x].hi;
        idx_(p, 2) = static_cast<Eigen::Index>(ty[y].hi) * src_w_ + tx[x].lo;
        idx_(p, 3) = static_cast<Eigen::Index>(ty[y].hi) * src_w_ + tx[x].hi;
        wgt_(p, 0) = ty[y].w_lo * tx[x].w_lo;
        wgt_(p, 1) = ty[y].w_lo * tx[x].w_hi;
        wgt_(p, 2) = ty[y].w_hi * tx[x].w_lo;
        wgt_(p, 3) = ty[y].w_hi * tx[x].w_hi;
      }
  }

  int size() const { return size_; }

  /// (size*size) x 3 normalized input.
  MatrixX<Scalar> forward(const MatrixX<Scalar>& crop) const {
    require(crop.rows() == src_h_ && crop.cols() == src_w_,
            "crop shape does not match the pipeline");
    const Eigen::Index n = idx_.rows();
    VectorX<Scalar> gray(n);
    for (Eigen::Index p = 0; p < n; ++p) {
      Scalar acc = 0;
      for (int t = 0; t < 4; ++t)
        acc += static_cast<Scalar>(wgt_(p, t)) * crop(idx_(p, t) / src_w_, idx_(p, t) % src_w_);
      gray(p) = acc;
    }
    MatrixX<Scalar> out(n, 3);
    for (int c = 0; c < 3; ++c)
      out.col(c) = (gray.array() - Scalar(kInputMean[c])) / Scalar(kInputStd[c]);
    return out;
  }

  /// Pull a gradient at the network input back to the crop.
  MatrixX<Scalar> adjoint(const MatrixX<Scalar>& grad) const {
    require(grad.rows() == idx_.rows() && grad.cols() == 3,
            "input gradient shape mismatch");
    VectorX<Scalar> gray = VectorX<Scalar>::Zero(grad.rows());
    for (int c = 0; c < 3; ++c) gray += grad.col(c) / Scalar(kInputStd[c]);
    MatrixX<Scalar> out = MatrixX<Scalar>::Zero(src_h_, src_w_);
    for (Eigen::Index p = 0; p < grad.rows(); ++p)
      for (int t = 0; t < 4; ++t)
        out(idx_(p, t) / src_w_, idx_(p, t) % src_w_) +=
            static_cast<Scalar>(wgt_(p, t)) * gray(p);
    return out;
  }

 private:
  struct AxisTap {
    int lo, hi;
    double w_lo, w_hi;
  };

  // Half-pixel-centered sampling with edge clamp; exact identity when the
  // extents match.
  static std::vector<AxisTap> axis_taps(int dst_extent, int src_extent) {
    std::vector<AxisTap> taps(static_cast<std::size_t>(dst_extent));
    const double scale = static_cast<double>(src_extent) / dst_extent;
    for (int d = 0; d < dst_extent; ++d) {
      double s = (d + 0.5) * scale - 0.5;
      s = std::min(std::max(s, 0.0), static_cast<double>(src_extent - 1));
      const int lo = static_cast<int>(std::floor(s));
      const int hi = std::min(lo + 1, src_extent - 1);
      const double f = s - lo;
      taps[static_cast<std::size_t>(d)] = {lo, hi, 1.0 - f, f};
    }
    return taps;
  }

  int src_h_, src_w_, size_;
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 4> idx_;
  Eigen::Matrix<double, Eigen::Dynamic, 4> wgt_;
};

/// Frozen feature-extraction backbone: the conv net plus the identity of its
/// weights and the canonical input size.
template <typename Scalar>
class Backbone {
 public:
  Backbone(const std::vector<LayerDef>& topology, const WeightsFile& weights,
           int input_size = kDefaultInputSize)
      : net_(topology, weights), checksum_(weights.checksum()), input_size_(input_size) {
    require(input_size >= 32, "backbone input size must be >= 32");
  }

  static Backbone load(const std::string& weights_path,
                       int input_size = kDefaultInputSize) {
    return Backbone(vgg19_topology(), WeightsFile::load(weights_path), input_size);
  }

  const ConvNet<Scalar>& net() const { return net_; }
  const std::string& checksum() const { return checksum_; }
  int input_size() const { return input_size_; }

  /// prepare_input: crop -> normalized (S*S) x 3 network input.
  MatrixX<Scalar> prepare_input(const IrisCrop<Scalar>& crop, int size = 0) const {
    const int s = size > 0 ? size : input_size_;
    InputPipeline<Scalar> pipeline(static_cast<int>(crop.height()),
                                   static_cast<int>(crop.width()), s);
    return pipeline.forward(crop.pixels);
  }

 private:
  ConvNet<Scalar> net_;
  std::string checksum_;
  int input_size_;
};

using BackboneF = Backbone<float>;
using BackboneD = Backbone<double>;

}  // namespace iristyle

#endif  // IRISTYLE_BACKBONE_BACKBONE_HPP_

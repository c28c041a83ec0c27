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

#ifndef IRISTYLE_BACKBONE_NET_HPP_
#define IRISTYLE_BACKBONE_NET_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "iristyle/backbone/weights.hpp"
#include "iristyle/common.hpp"

namespace iristyle {

/// Activations of one layer. Channels live in columns so that each channel is
/// contiguous; the spatial index is y * width + x.
template <typename Scalar>
struct FeatureMap {
  MatrixX<Scalar> values;  // (height*width) x channels
  int height = 0;
  int width = 0;

  int channels() const { return static_cast<int>(values.cols()); }
};

/// Flatten channel-major, then row, then column. With the (pixels x channels)
/// column-major layout this is exactly the storage order.
template <typename Scalar>
VectorX<Scalar> flatten_feature_map(const FeatureMap<Scalar>& map) {
  return Eigen::Map<const VectorX<Scalar>>(map.values.data(), map.values.size());
}

/// Frozen sequential 3x3-conv / relu / 2x2-maxpool network with named
/// post-activation taps. Weights never change after construction; forward and
/// input_gradient are const and reentrant.
template <typename Scalar>
class ConvNet {
 public:
  ConvNet(const std::vector<LayerDef>& defs, const WeightsFile& weights) {
    std::size_t wi = 0;
    int channels = -1;
    for (const auto& def : defs) {
      Layer layer;
      layer.kind = def.kind;
      layer.name = def.name;
      if (def.kind == LayerDef::kConv) {
        require(wi < weights.convs.size(),
                "weights file has fewer conv layers than the topology expects");
        const ConvWeights& cw = weights.convs[wi++];
        check_conv(def, cw);
        if (channels < 0) channels = def.in_channels;
        require(channels == def.in_channels,
                "topology channel mismatch entering " + def.name);
        layer.weight.resize(def.in_channels * 9, def.out_channels);
        for (int oc = 0; oc < def.out_channels; ++oc)
          for (int ic = 0; ic < def.in_channels; ++ic)
            for (int k = 0; k < 9; ++k)
              layer.weight(ic * 9 + k, oc) =
                  static_cast<Scalar>(cw.kernel[(static_cast<std::size_t>(oc) * def.in_channels + ic) * 9 + k]);
        layer.bias.resize(def.out_channels);
        for (int oc = 0; oc < def.out_channels; ++oc)
          layer.bias(oc) = static_cast<Scalar>(cw.bias[static_cast<std::size_t>(oc)]);
        channels = def.out_channels;
      }
      layer.channels = channels;
      layers_.push_back(std::move(layer));
      if (def.kind != LayerDef::kConv)
        tap_index_[def.name] = static_cast<int>(layers_.size()) - 1;
    }
    require(wi == weights.convs.size(),
            "weights file has more conv layers than the topology expects");
    input_channels_ = defs.empty() ? 0 : defs.front().in_channels;
  }

  int input_channels() const { return input_channels_; }

  bool has_tap(const std::string& name) const { return tap_index_.count(name) != 0; }

  int tap_channels(const std::string& name) const {
    return layers_[static_cast<std::size_t>(tap_layer(name))].channels;
  }

  std::vector<std::string> tap_names() const {
    std::vector<std::string> names;
    for (const auto& l : layers_)
      if (l.kind != LayerDef::kConv) names.push_back(l.name);
    return names;
  }

  /// Per-layer state of one forward pass, kept for the backward pass.
  struct Forward {
    std::vector<MatrixX<Scalar>> outputs;       // per layer, up to deepest
    std::vector<Eigen::MatrixXi> pool_argmax;   // per layer (empty unless pool)
    std::vector<std::pair<int, int>> dims;      // (H, W) after each layer
    int deepest = -1;
  };

  /// Run the network as deep as the requested taps need. Input is one
  /// (H*W) x input_channels activation map.
  Forward forward(const MatrixX<Scalar>& input, int height, int width,
                  const std::vector<std::string>& taps) const {
    require(input.rows() == static_cast<Eigen::Index>(height) * width &&
                input.cols() == input_channels_,
            "backbone input shape mismatch");
    int deepest = -1;
    for (const auto& t : taps) deepest = std::max(deepest, tap_layer(t));
    require(deepest >= 0, "no taps requested");

    Forward fwd;
    fwd.deepest = deepest;
    fwd.outputs.resize(static_cast<std::size_t>(deepest) + 1);
    fwd.pool_argmax.resize(static_cast<std::size_t>(deepest) + 1);
    fwd.dims.resize(static_cast<std::size_t>(deepest) + 1);

    const MatrixX<Scalar>* current = &input;
    int h = height, w = width;
    for (int li = 0; li <= deepest; ++li) {
      const Layer& layer = layers_[static_cast<std::size_t>(li)];
      MatrixX<Scalar>& out = fwd.outputs[static_cast<std::size_t>(li)];
      switch (layer.kind) {
        case LayerDef::kConv:
          conv3x3_forward(*current, h, w, layer.weight, layer.bias, out);
          break;
        case LayerDef::kRelu:
          out = current->cwiseMax(Scalar(0));
          break;
        case LayerDef::kPool:
          pool2x2_forward(*current, h, w, out,
                          fwd.pool_argmax[static_cast<std::size_t>(li)]);
          h /= 2;
          w /= 2;
          require(h >= 1 && w >= 1, "input too small for pooling depth");
          break;
      }
      fwd.dims[static_cast<std::size_t>(li)] = {h, w};
      current = &out;
    }
    return fwd;
  }

  const MatrixX<Scalar>& tap_output(const Forward& fwd, const std::string& name) const {
    const int li = tap_layer(name);
    require(li <= fwd.deepest, "tap " + name + " was not computed in this pass");
    return fwd.outputs[static_cast<std::size_t>(li)];
  }

  FeatureMap<Scalar> tap_feature_map(const Forward& fwd, const std::string& name) const {
    const int li = tap_layer(name);
    require(li <= fwd.deepest, "tap " + name + " was not computed in this pass");
    const auto [h, w] = fwd.dims[static_cast<std::size_t>(li)];
    return FeatureMap<Scalar>{fwd.outputs[static_cast<std::size_t>(li)], h, w};
  }

  std::pair<int, int> tap_dims(const Forward& fwd, const std::string& name) const {
    const int li = tap_layer(name);
    require(li <= fwd.deepest, "tap " + name + " was not computed in this pass");
    return fwd.dims[static_cast<std::size_t>(li)];
  }

  /// Back-propagate gradients injected at tap outputs down to the network
  /// input. Returns d(objective)/d(input), same shape as the forward input.
  MatrixX<Scalar> input_gradient(const Forward& fwd, int height, int width,
                                 const std::map<std::string, MatrixX<Scalar>>& tap_grads) const {
    std::vector<const MatrixX<Scalar>*> injected(
        static_cast<std::size_t>(fwd.deepest) + 1, nullptr);
    for (const auto& [name, grad] : tap_grads) {
      const int li = tap_layer(name);
      require(li <= fwd.deepest, "tap " + name + " was not computed in this pass");
      require(grad.rows() == fwd.outputs[static_cast<std::size_t>(li)].rows() &&
                  grad.cols() == fwd.outputs[static_cast<std::size_t>(li)].cols(),
              "tap gradient shape mismatch at " + name);
      injected[static_cast<std::size_t>(li)] = &grad;
    }

    MatrixX<Scalar> grad =
        MatrixX<Scalar>::Zero(fwd.outputs[static_cast<std::size_t>(fwd.deepest)].rows(),
                              fwd.outputs[static_cast<std::size_t>(fwd.deepest)].cols());
    for (int li = fwd.deepest; li >= 0; --li) {
      if (injected[static_cast<std::size_t>(li)] != nullptr)
        grad += *injected[static_cast<std::size_t>(li)];
      const Layer& layer = layers_[static_cast<std::size_t>(li)];
      const auto [h, w] = fwd.dims[static_cast<std::size_t>(li)];
      MatrixX<Scalar> grad_in;
      switch (layer.kind) {
        case LayerDef::kConv:
          conv3x3_backward(grad, h, w, layer.weight, grad_in);
          break;
        case LayerDef::kRelu:
          grad_in = (fwd.outputs[static_cast<std::size_t>(li)].array() > Scalar(0))
                        .select(grad, MatrixX<Scalar>::Zero(grad.rows(), grad.cols()));
          break;
        case LayerDef::kPool: {
          const auto [hi, wi] =
              li == 0 ? std::pair<int, int>{height, width}
                      : fwd.dims[static_cast<std::size_t>(li) - 1];
          pool2x2_backward(grad, fwd.pool_argmax[static_cast<std::size_t>(li)], hi, wi, grad_in);
          break;
        }
      }
      grad = std::move(grad_in);
    }
    return grad;
  }

 private:
  struct Layer {
    LayerDef::Kind kind;
    std::string name;
    MatrixX<Scalar> weight;  // (in*9) x out
    VectorX<Scalar> bias;
    int channels = 0;  // channels of this layer's output
  };

  static void check_conv(const LayerDef& def, const ConvWeights& cw) {
    if (cw.name == def.name && cw.in_channels == def.in_channels &&
        cw.out_channels == def.out_channels)
      return;
    fail("weights layer mismatch: expected " + def.name + " (" +
         std::to_string(def.out_channels) + "x" + std::to_string(def.in_channels) +
         "x3x3), found " + cw.name + " (" + std::to_string(cw.out_channels) + "x" +
         std::to_string(cw.in_channels) + "x3x3)");
  }

  int tap_layer(const std::string& name) const {
    auto it = tap_index_.find(name);
    require(it != tap_index_.end(), "unknown backbone tap: " + name);
    return it->second;
  }

  // Banded im2col keeps the scratch matrix small; bands are processed in a
  // fixed order so results are deterministic.
  static int band_rows_for(int channels, int width, int height) {
    const std::size_t budget = std::size_t(4) << 20;
    const std::size_t row_bytes =
        static_cast<std::size_t>(width) * channels * 9 * sizeof(Scalar);
    int rows = static_cast<int>(std::max<std::size_t>(1, budget / std::max<std::size_t>(1, row_bytes)));
    return std::min(rows, height);
  }

  static void conv3x3_forward(const MatrixX<Scalar>& in, int h, int w,
                              const MatrixX<Scalar>& weight, const VectorX<Scalar>& bias,
                              MatrixX<Scalar>& out) {
    const int cin = static_cast<int>(in.cols());
    const int cout = static_cast<int>(weight.cols());
    out.resize(static_cast<Eigen::Index>(h) * w, cout);
    const int band = band_rows_for(cin, w, h);
    MatrixX<Scalar> col(static_cast<Eigen::Index>(band) * w, cin * 9);
    for (int y0 = 0; y0 < h; y0 += band) {
      const int rows = std::min(band, h - y0);
      auto colb = col.topRows(static_cast<Eigen::Index>(rows) * w);
      colb.setZero();
      for (int c = 0; c < cin; ++c)
        for (int ky = 0; ky < 3; ++ky)
          for (int kx = 0; kx < 3; ++kx) {
            const int j = c * 9 + ky * 3 + kx;
            const int dx = kx - 1;
            for (int y = y0; y < y0 + rows; ++y) {
              const int sy = y + ky - 1;
              if (sy < 0 || sy >= h) continue;
              const Eigen::Index dst = static_cast<Eigen::Index>(y - y0) * w;
              const Eigen::Index src = static_cast<Eigen::Index>(sy) * w;
              if (dx == 0)
                colb.col(j).segment(dst, w) = in.col(c).segment(src, w);
              else if (dx < 0)
                colb.col(j).segment(dst + 1, w - 1) = in.col(c).segment(src, w - 1);
              else
                colb.col(j).segment(dst, w - 1) = in.col(c).segment(src + 1, w - 1);
            }
          }
      out.middleRows(static_cast<Eigen::Index>(y0) * w, static_cast<Eigen::Index>(rows) * w)
          .noalias() = colb * weight;
    }
    out.rowwise() += bias.transpose();
  }

  static void conv3x3_backward(const MatrixX<Scalar>& dout, int h, int w,
                               const MatrixX<Scalar>& weight, MatrixX<Scalar>& din) {
    const int cin = static_cast<int>(weight.rows()) / 9;
    din.setZero(static_cast<Eigen::Index>(h) * w, cin);
    const int band = band_rows_for(cin, w, h);
    MatrixX<Scalar> colgrad(static_cast<Eigen::Index>(band) * w, cin * 9);
    for (int y0 = 0; y0 < h; y0 += band) {
      const int rows = std::min(band, h - y0);
      auto cg = colgrad.topRows(static_cast<Eigen::Index>(rows) * w);
      cg.noalias() =
          dout.middleRows(static_cast<Eigen::Index>(y0) * w, static_cast<Eigen::Index>(rows) * w) *
          weight.transpose();
      for (int c = 0; c < cin; ++c)
        for (int ky = 0; ky < 3; ++ky)
          for (int kx = 0; kx < 3; ++kx) {
            const int j = c * 9 + ky * 3 + kx;
            const int dx = kx - 1;
            for (int y = y0; y < y0 + rows; ++y) {
              const int sy = y + ky - 1;
              if (sy < 0 || sy >= h) continue;
              const Eigen::Index dst = static_cast<Eigen::Index>(y - y0) * w;
              const Eigen::Index src = static_cast<Eigen::Index>(sy) * w;
              if (dx == 0)
                din.col(c).segment(src, w) += cg.col(j).segment(dst, w);
              else if (dx < 0)
                din.col(c).segment(src, w - 1) += cg.col(j).segment(dst + 1, w - 1);
              else
                din.col(c).segment(src + 1, w - 1) += cg.col(j).segment(dst, w - 1);
            }
          }
    }
  }

  static void pool2x2_forward(const MatrixX<Scalar>& in, int h, int w,
                              MatrixX<Scalar>& out, Eigen::MatrixXi& argmax) {
    const int c = static_cast<int>(in.cols());
    const int ho = h / 2, wo = w / 2;
    out.resize(static_cast<Eigen::Index>(ho) * wo, c);
    argmax.resize(static_cast<Eigen::Index>(ho) * wo, c);
    for (int ch = 0; ch < c; ++ch) {
      const Scalar* src = in.col(ch).data();
      Scalar* dst = out.col(ch).data();
      int* arg = argmax.col(ch).data();
      for (int yo = 0; yo < ho; ++yo)
        for (int xo = 0; xo < wo; ++xo) {
          const int base = (yo * 2) * w + xo * 2;
          int best = base;
          Scalar bv = src[base];
          if (src[base + 1] > bv) { bv = src[base + 1]; best = base + 1; }
          if (src[base + w] > bv) { bv = src[base + w]; best = base + w; }
          if (src[base + w + 1] > bv) { bv = src[base + w + 1]; best = base + w + 1; }
          dst[yo * wo + xo] = bv;
          arg[yo * wo + xo] = best;
        }
    }
  }

  static void pool2x2_backward(const MatrixX<Scalar>& dout, const Eigen::MatrixXi& argmax,
                               int h_in, int w_in, MatrixX<Scalar>& din) {
    const int c = static_cast<int>(dout.cols());
    din.setZero(static_cast<Eigen::Index>(h_in) * w_in, c);
    for (int ch = 0; ch < c; ++ch) {
      const Scalar* g = dout.col(ch).data();
      const int* arg = argmax.col(ch).data();
      Scalar* d = din.col(ch).data();
      for (Eigen::Index p = 0; p < dout.rows(); ++p) d[arg[p]] += g[p];
    }
  }

  std::vector<Layer> layers_;
  std::map<std::string, int> tap_index_;
  int input_channels_ = 0;
};

}  // namespace iristyle

#endif  // IRISTYLE_BACKBONE_NET_HPP_

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

#ifndef IRISTYLE_TRANSFER_TRANSFER_HPP_
#define IRISTYLE_TRANSFER_TRANSFER_HPP_

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "iristyle/backbone/backbone.hpp"
#include "iristyle/imaging/iris.hpp"
#include "iristyle/rng.hpp"
#include "iristyle/transfer/lbfgs.hpp"
#include "iristyle/transfer/losses.hpp"

namespace iristyle {

/// Knobs of the stylization optimizer. One epoch is one quasi-Newton step
/// with a bounded backtracking line search over [0,1]-clamped candidates.
template <typename Scalar>
struct TransferConfig {
  Scalar alpha = 1;  // content weight
  Scalar beta = 1;   // style weight
  int epochs = 200;
  std::string content_tap = kContentTap;
  std::vector<std::string> style_taps = default_style_taps();
  VectorX<Scalar> style_tap_weights;  // empty -> equal weights summing to 1
  Scalar step_size = 1;               // initial line-search step
  int max_inner_evals = 20;           // per-epoch objective/gradient budget
  enum Init { kCloneContent, kRandomNoise } init = kCloneContent;
  int input_size = 0;  // 0 -> the backbone's canonical size
};

template <typename Scalar>
struct EpochLoss {
  Scalar total, content, style;
};

template <typename Scalar>
struct TransferResult {
  IrisCrop<Scalar> stylized;
  std::vector<EpochLoss<Scalar>> loss_trace;  // one entry per epoch
  EpochLoss<Scalar> initial;                  // loss at the initialization
};

namespace detail {

template <typename Scalar>
struct TransferObjective {
  const Backbone<Scalar>* backbone = nullptr;
  const InputPipeline<Scalar>* pipeline = nullptr;
  int input_size = 0;
  int crop_h = 0, crop_w = 0;
  Scalar alpha = 0, beta = 0;
  std::string content_tap;
  std::vector<std::string> style_taps;
  VectorX<Scalar> style_weights;
  FeatureMap<Scalar> content_target;
  std::vector<ChannelStats<Scalar>> style_targets;
  std::vector<std::string> active_taps;

  EpochLoss<Scalar> value(const VectorX<Scalar>& x) const {
    return eval(x, nullptr);
  }
  EpochLoss<Scalar> value_grad(const VectorX<Scalar>& x, VectorX<Scalar>& grad) const {
    return eval(x, &grad);
  }

  EpochLoss<Scalar> eval(const VectorX<Scalar>& x, VectorX<Scalar>* grad) const {
    const Eigen::Map<const MatrixX<Scalar>> crop_view(x.data(), crop_h, crop_w);
    const MatrixX<Scalar> prepared = pipeline->forward(crop_view);
    const auto fwd = backbone->net().forward(prepared, input_size, input_size, active_taps);

    EpochLoss<Scalar> loss{0, 0, 0};
    std::map<std::string, MatrixX<Scalar>> tap_grads;
    if (alpha > Scalar(0)) {
      const auto x_map = backbone->net().tap_feature_map(fwd, content_tap);
      if (grad != nullptr) {
        MatrixX<Scalar> g;
        loss.content = content_loss_grad(content_target, x_map, g);
        tap_grads[content_tap] = alpha * g;
      } else {
        loss.content = content_loss(content_target, x_map);
      }
    }
    if (beta > Scalar(0)) {
      for (std::size_t l = 0; l < style_taps.size(); ++l) {
        const auto x_map = backbone->net().tap_feature_map(fwd, style_taps[l]);
        const Scalar w = style_weights(static_cast<Eigen::Index>(l));
        if (grad != nullptr) {
          MatrixX<Scalar> g;
          const Scalar tap_loss = style_loss_tap_grad(style_targets[l], x_map, g);
          loss.style += w * tap_loss;
          auto [it, fresh] = tap_grads.try_emplace(style_taps[l], beta * w * g);
          if (!fresh) it->second += beta * w * g;
        } else {
          loss.style += w * style_loss_tap(style_targets[l], channel_stats(x_map));
        }
      }
    }
    loss.total = alpha * loss.content + beta * loss.style;
    if (grad != nullptr) {
      const MatrixX<Scalar> input_grad =
          backbone->net().input_gradient(fwd, input_size, input_size, tap_grads);
      const MatrixX<Scalar> crop_grad = pipeline->adjoint(input_grad);
      *grad = Eigen::Map<const VectorX<Scalar>>(crop_grad.data(), crop_grad.size());
    }
    return loss;
  }
};

template <typename Scalar>
bool finite(const EpochLoss<Scalar>& l) {
  return std::isfinite(static_cast<double>(l.total));
}

}  // namespace detail

/// Iterative pixel optimization of the content crop toward the donor's
/// channel statistics. Content features and style statistics are computed
/// once up front and frozen; pixels are clamped to [0,1] every epoch, and the
/// line search only ever accepts a candidate that does not increase the total
/// loss, so the final loss never exceeds the initial one.
template <typename Scalar>
TransferResult<Scalar> transfer(const Backbone<Scalar>& backbone,
                                const IrisCrop<Scalar>& content,
                                const IrisCrop<Scalar>& style,
                                const TransferConfig<Scalar>& config,
                                Rng* noise_rng = nullptr) {
  require(content.pixels.size() > 0 && style.pixels.size() > 0,
          "transfer needs nonempty crops");
  require(config.alpha >= Scalar(0) && config.beta >= Scalar(0) &&
              config.alpha + config.beta > Scalar(0),
          "transfer needs alpha >= 0, beta >= 0, alpha + beta > 0");
  require(config.epochs >= 1, "transfer needs epochs >= 1");
  require(config.max_inner_evals >= 2, "max_inner_evals must be >= 2");
  require(config.step_size > Scalar(0), "step_size must be > 0");

  const int size = config.input_size > 0 ? config.input_size : backbone.input_size();
  const int h = static_cast<int>(content.height());
  const int w = static_cast<int>(content.width());
  const InputPipeline<Scalar> pipeline(h, w, size);

  detail::TransferObjective<Scalar> objective;
  objective.backbone = &backbone;
  objective.pipeline = &pipeline;
  objective.input_size = size;
  objective.crop_h = h;
  objective.crop_w = w;
  objective.alpha = config.alpha;
  objective.beta = config.beta;
  objective.content_tap = config.content_tap;
  objective.style_taps = config.style_taps;

  if (config.beta > Scalar(0)) {
    require(!config.style_taps.empty(), "style transfer needs style taps");
    if (config.style_tap_weights.size() == 0) {
      objective.style_weights = VectorX<Scalar>::Constant(
          static_cast<Eigen::Index>(config.style_taps.size()),
          Scalar(1) / static_cast<Scalar>(config.style_taps.size()));
    } else {
      require(config.style_tap_weights.size() ==
                  static_cast<Eigen::Index>(config.style_taps.size()),
              "style tap weight count mismatch");
      require((config.style_tap_weights.array() >= Scalar(0)).all(),
              "style tap weights must be >= 0");
      objective.style_weights = config.style_tap_weights;
    }
    objective.active_taps.insert(objective.active_taps.end(), config.style_taps.begin(),
                                 config.style_taps.end());
  }
  if (config.alpha > Scalar(0)) objective.active_taps.push_back(config.content_tap);

  // Frozen targets. The content pass reuses the exact pipeline the objective
  // evaluates through, so a cloned initialization starts at zero content loss.
  if (config.alpha > Scalar(0)) {
    const MatrixX<Scalar> prep = pipeline.forward(content.pixels);
    const std::vector<std::string> taps = {config.content_tap};
    const auto fwd = backbone.net().forward(prep, size, size, taps);
    objective.content_target = backbone.net().tap_feature_map(fwd, config.content_tap);
  }
  if (config.beta > Scalar(0)) {
    const InputPipeline<Scalar> style_pipeline(static_cast<int>(style.height()),
                                               static_cast<int>(style.width()), size);
    const MatrixX<Scalar> prep = style_pipeline.forward(style.pixels);
    const auto fwd = backbone.net().forward(prep, size, size, config.style_taps);
    for (const auto& tap : config.style_taps)
      objective.style_targets.push_back(
          channel_stats(backbone.net().tap_feature_map(fwd, tap)));
  }

  // Initial point.
  VectorX<Scalar> x(static_cast<Eigen::Index>(h) * w);
  if (config.init == TransferConfig<Scalar>::kCloneContent) {
    x = Eigen::Map<const VectorX<Scalar>>(content.pixels.data(), content.pixels.size());
  } else {
    Rng local(0);
    Rng& rng = noise_rng != nullptr ? *noise_rng : local;
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = static_cast<Scalar>(rng.uniform());
  }
  x = x.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));

  TransferResult<Scalar> result;
  result.loss_trace.reserve(static_cast<std::size_t>(config.epochs));

  VectorX<Scalar> grad;
  EpochLoss<Scalar> current = objective.value_grad(x, grad);
  require(detail::finite(current) && grad.allFinite(),
          "non-finite loss at initialization");
  result.initial = current;

  LbfgsHistory<Scalar> history;
  const Scalar armijo = Scalar(1e-4);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (grad.squaredNorm() > Scalar(0)) {
      VectorX<Scalar> dir = history.direction(grad);
      if (dir.dot(grad) >= Scalar(0)) dir = -grad;  // enforce descent
      int evals_left = config.max_inner_evals;
      Scalar t = config.step_size;
      VectorX<Scalar> candidate;
      bool accepted = false;
      while (evals_left > 1) {
        candidate = (x + t * dir).cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
        if (candidate == x) break;  // projection swallowed the step
        const EpochLoss<Scalar> trial = objective.value(candidate);
        --evals_left;
        require(detail::finite(trial),
                "non-finite loss in epoch " + std::to_string(epoch + 1) +
                    "; keeping the last finite state would hide divergence");
        const Scalar decrease = grad.dot(candidate - x);
        if (trial.total <= current.total + armijo * decrease &&
            trial.total <= current.total) {
          VectorX<Scalar> new_grad;
          const EpochLoss<Scalar> accepted_loss = objective.value_grad(candidate, new_grad);
          require(new_grad.allFinite(), "non-finite gradient in epoch " +
                                            std::to_string(epoch + 1));
          history.push(candidate - x, new_grad - grad);
          x = std::move(candidate);
          grad = std::move(new_grad);
          current = accepted_loss;
          accepted = true;
          break;
        }
        t *= Scalar(0.5);
      }
      (void)accepted;  // an exhausted search keeps x; the epoch records `current`
    }
    result.loss_trace.push_back(current);
  }

  result.stylized.pixels = Eigen::Map<const MatrixX<Scalar>>(x.data(), h, w);
  result.stylized.bbox = content.bbox;
  result.stylized.validity = content.validity;
  result.stylized.glints = content.glints;
  return result;
}

/// Full-image stylization: extract both iris crops, run the transfer, and put
/// the result back with the content image's glints restored. Non-iris pixels
/// are untouched.
template <typename Scalar>
EyeImage stylize_eye(const Backbone<Scalar>& backbone, const EyeImage& content_image,
                     const SegMask& content_mask, const EyeImage& donor_image,
                     const SegMask& donor_mask, int glint_threshold,
                     const TransferConfig<Scalar>& config, Rng* noise_rng = nullptr) {
  const IrisCrop<Scalar> content = extract_iris<Scalar>(content_image, content_mask, glint_threshold);
  const IrisCrop<Scalar> donor = extract_iris<Scalar>(donor_image, donor_mask, glint_threshold);
  const TransferResult<Scalar> result = transfer(backbone, content, donor, config, noise_rng);
  return reinsert(content_image, result.stylized, content_mask);
}

/// Single-layer style reconstruction from noise: alpha forced to 0, one style
/// tap, pixels initialized Uniform[0,1] from the caller's stream.
template <typename Scalar>
TransferResult<Scalar> reconstruct_style(const Backbone<Scalar>& backbone,
                                         const IrisCrop<Scalar>& style,
                                         const std::string& tap, int epochs, Rng& rng) {
  TransferConfig<Scalar> config;
  config.alpha = 0;
  config.beta = 1;
  config.epochs = epochs;
  config.style_taps = {tap};
  config.style_tap_weights = VectorX<Scalar>::Ones(1);
  config.init = TransferConfig<Scalar>::kRandomNoise;
  return transfer(backbone, style, style, config, &rng);
}

}  // namespace iristyle

#endif  // IRISTYLE_TRANSFER_TRANSFER_HPP_

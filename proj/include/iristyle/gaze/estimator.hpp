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

#ifndef IRISTYLE_GAZE_ESTIMATOR_HPP_
#define IRISTYLE_GAZE_ESTIMATOR_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "iristyle/backbone/net.hpp"
#include "iristyle/data/manifest.hpp"
#include "iristyle/gaze/ellipse.hpp"
#include "iristyle/gaze/landmarks.hpp"

namespace iristyle {

/// Segmentation source for gaze evaluation: ground truth, an external
/// predictor, or the desk-scale threshold stand-in (harness module).
using MaskProvider = std::function<SegMask(const EyeImage&, const DataRecord&)>;

/// Optional image transform applied before inference (e.g. stylization).
using ImageTransform = std::function<EyeImage(const EyeImage&, const DataRecord&)>;

enum class GazeEstimatorKind { kModelBased, kAppearanceBased };

/// Regression head over either the 19 mask landmarks (model-based) or the
/// flattened activations of a frozen conv feature extractor
/// (appearance-based). Predictions are renormalized to unit vectors.
struct GazeEstimator {
  GazeEstimatorKind kind = GazeEstimatorKind::kModelBased;

  // appearance path: frozen extractor over the resized gray image
  std::shared_ptr<const ConvNet<float>> extractor;
  int appearance_input = 64;

  // regression MLP (hidden relu layer, linear 3-way output)
  MatrixX<float> w1, w2;
  VectorX<float> b1, b2;
  VectorX<float> feature_mean, feature_scale;
};

struct GazeTrainConfig {
  int batch_size = 128;
  float learning_rate = 1e-5f;
  int epochs = 400;
  std::uint64_t seed = 42;
  int hidden = 256;
  int appearance_input = 64;
  std::uint64_t extractor_seed = 42;
};

/// Input features for one record: normalized landmarks (model-based; the mask
/// comes from `masks`) or frozen conv activations (appearance-based).
VectorX<float> gaze_features(const GazeEstimator& estimator, const EyeImage& image,
                             const SegMask* mask);

Eigen::Vector3d predict_gaze(const GazeEstimator& estimator, const EyeImage& image,
                             const SegMask* mask);

GazeEstimator train_gaze_estimator(GazeEstimatorKind kind,
                                   const std::vector<const DataRecord*>& train,
                                   const MaskProvider& masks,
                                   const GazeTrainConfig& config);

struct GazeEvaluation {
  double mean_error_deg = 0;
  std::vector<std::pair<std::string, double>> per_record;  // (record_id, degrees)
};

/// Mean and per-record angular error over records with gaze labels; the
/// transform (when set) is applied to every image before inference, and for
/// the model-based estimator the mask provider sees the transformed image.
GazeEvaluation evaluate_gaze(const GazeEstimator& estimator,
                             const std::vector<const DataRecord*>& records,
                             const MaskProvider& masks,
                             const ImageTransform& transform = {}, int threads = 1);

std::string parameter_checksum(const GazeEstimator& estimator);

}  // namespace iristyle

#endif  // IRISTYLE_GAZE_ESTIMATOR_HPP_

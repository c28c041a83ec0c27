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

#ifndef IRISTYLE_RECOGNITION_HEAD_HPP_
#define IRISTYLE_RECOGNITION_HEAD_HPP_

#include <string>
#include <vector>

#include "iristyle/common.hpp"
#include "iristyle/recognition/metrics.hpp"

namespace iristyle {

/// Two 4,096-wide rectified fully-connected layers with dropout, then a
/// softmax projection: the shape of the original VGG classification head.
/// Features are standardized with train-set statistics stored in the head.
struct ClassifierHead {
  MatrixX<float> w1, w2, w3;  // (hidden x in), (hidden x hidden), (K x hidden)
  VectorX<float> b1, b2, b3;
  VectorX<float> feature_mean;
  VectorX<float> feature_scale;  // 1 / max(stddev, 1e-6)
  std::uint64_t seed = 0;

  Eigen::Index input_dim() const { return w1.cols(); }
  int num_classes() const { return static_cast<int>(w3.rows()); }
};

struct TrainConfig {
  int batch_size = 64;
  float learning_rate = 1e-5f;
  int epochs = 100;
  std::uint64_t seed = 42;
  int hidden = 4096;
  float dropout = 0.5f;
};

struct EpochStats {
  double train_loss = 0;
  double test_loss = 0;
  double test_accuracy = 0;
  double test_f1 = 0;
  double test_mcc = 0;
};

struct TrainedClassifier {
  ClassifierHead head;
  std::vector<EpochStats> history;  // one row per epoch
};

/// Class probabilities for one feature vector (softmax output, sums to 1).
VectorX<float> predict(const ClassifierHead& head, const VectorX<float>& feature);

int predict_class(const ClassifierHead& head, const VectorX<float>& feature);

/// Cross-entropy minimization with the adaptive-moment optimizer,
/// deterministic given the seed. Features are columns of the input matrices.
TrainedClassifier train_classifier(const MatrixX<float>& train_features,
                                   const std::vector<int>& train_labels,
                                   const MatrixX<float>& test_features,
                                   const std::vector<int>& test_labels,
                                   const TrainConfig& config);

RecognitionMetrics evaluate(const ClassifierHead& head, const MatrixX<float>& features,
                            const std::vector<int>& labels);

/// FNV-1a over every parameter byte; used by the frozen-model checks.
std::string parameter_checksum(const ClassifierHead& head);

/// Checkpoint with a header recording input_dim, class count, and seed.
void save_classifier(const ClassifierHead& head, const std::string& path);
ClassifierHead load_classifier(const std::string& path);

}  // namespace iristyle

#endif  // IRISTYLE_RECOGNITION_HEAD_HPP_

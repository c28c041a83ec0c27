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

#ifndef IRISTYLE_RECOGNITION_METRICS_HPP_
#define IRISTYLE_RECOGNITION_METRICS_HPP_

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "iristyle/common.hpp"

namespace iristyle {

struct RecognitionMetrics {
  double accuracy = 0;
  double macro_f1 = 0;
  double mcc = 0;
};

/// confusion(i, j) = count of records with truth i predicted j.
inline Eigen::MatrixXi confusion_matrix(int num_classes, const std::vector<int>& truth,
                                        const std::vector<int>& predicted) {
  require(truth.size() == predicted.size() && !truth.empty(),
          "confusion matrix needs matched nonempty label lists");
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] >= 0 && truth[i] < num_classes && predicted[i] >= 0 &&
                predicted[i] < num_classes,
            "label outside [0, K)");
    confusion(truth[i], predicted[i]) += 1;
  }
  return confusion;
}

/// Accuracy, unweighted per-class F1 mean, and the multiclass Matthews
/// coefficient computed from the full confusion matrix.
inline RecognitionMetrics metrics_from_confusion(const Eigen::MatrixXi& confusion) {
  const int k = static_cast<int>(confusion.rows());
  const double total = confusion.sum();
  require(total > 0, "empty confusion matrix");

  RecognitionMetrics metrics;
  metrics.accuracy = confusion.diagonal().sum() / total;

  double f1_sum = 0;
  for (int c = 0; c < k; ++c) {
    const double tp = confusion(c, c);
    const double denom = 2 * tp + (confusion.col(c).sum() - tp) + (confusion.row(c).sum() - tp);
    f1_sum += denom > 0 ? 2 * tp / denom : 0.0;
  }
  metrics.macro_f1 = f1_sum / k;

  // Gorodkin's R_K over truth counts t and prediction counts p.
  const Eigen::VectorXd t = confusion.rowwise().sum().cast<double>();
  const Eigen::VectorXd p = confusion.colwise().sum().transpose().cast<double>();
  const double c_trace = confusion.diagonal().sum();
  const double num = c_trace * total - t.dot(p);
  const double den =
      std::sqrt((total * total - p.squaredNorm()) * (total * total - t.squaredNorm()));
  metrics.mcc = den > 0 ? num / den : 0.0;
  return metrics;
}

inline RecognitionMetrics compute_metrics(int num_classes, const std::vector<int>& truth,
                                          const std::vector<int>& predicted) {
  return metrics_from_confusion(confusion_matrix(num_classes, truth, predicted));
}

}  // namespace iristyle

#endif  // IRISTYLE_RECOGNITION_METRICS_HPP_

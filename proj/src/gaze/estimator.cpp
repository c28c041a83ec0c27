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

#include "iristyle/gaze/estimator.hpp"

#include <cmath>

#include "iristyle/backbone/weights.hpp"
#include "iristyle/parallel.hpp"
#include "iristyle/rng.hpp"

namespace iristyle {
namespace {

// Half-pixel-centered bilinear resize of a gray raster into (size x size),
// values in [0,1].
MatrixX<float> resize_gray(const ImageU8& src, int size) {
  const int sh = static_cast<int>(src.rows()), sw = static_cast<int>(src.cols());
  MatrixX<float> out(static_cast<Eigen::Index>(size) * size, 1);
  for (int y = 0; y < size; ++y) {
    double fy = (y + 0.5) * sh / size - 0.5;
    fy = std::min(std::max(fy, 0.0), static_cast<double>(sh - 1));
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, sh - 1);
    const double wy = fy - y0;
    for (int x = 0; x < size; ++x) {
      double fx = (x + 0.5) * sw / size - 0.5;
      fx = std::min(std::max(fx, 0.0), static_cast<double>(sw - 1));
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, sw - 1);
      const double wx = fx - x0;
      const double v = (1 - wy) * ((1 - wx) * src(y0, x0) + wx * src(y0, x1)) +
                       wy * ((1 - wx) * src(y1, x0) + wx * src(y1, x1));
      out(static_cast<Eigen::Index>(y) * size + x, 0) = static_cast<float>(v / 255.0);
    }
  }
  return out;
}

// Landmarks in pixel units -> [0,1]-ish scale: x-like features by width,
// y-like by height, angles by pi; area ratios pass through.
VectorX<float> normalize_landmarks(const VectorX<double>& lm, double width, double height) {
  VectorX<float> out(kNumLandmarks);
  const double w = width, h = height;
  const double scales[kNumLandmarks] = {w, h, w, h, M_PI, 1.0,  //
                                        w, h, w, h, M_PI, 1.0,  //
                                        w, h, w, h, w, h, 1.0};
  for (int i = 0; i < kNumLandmarks; ++i)
    out(i) = static_cast<float>(lm(i) / scales[i]);
  return out;
}

MatrixX<float> he_matrix(Eigen::Index rows, Eigen::Index cols, Rng rng) {
  MatrixX<float> m(rows, cols);
  const double stddev = std::sqrt(2.0 / static_cast<double>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<float>(stddev * rng.normal());
  return m;
}

struct Adam {
  MatrixX<float> m, v;
  explicit Adam(const MatrixX<float>& shape)
      : m(MatrixX<float>::Zero(shape.rows(), shape.cols())),
        v(MatrixX<float>::Zero(shape.rows(), shape.cols())) {}
  void step(MatrixX<float>& param, const MatrixX<float>& grad, float lr, int t) {
    constexpr float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;
    m = beta1 * m + (1 - beta1) * grad;
    v = beta2 * v.array().matrix() + (1 - beta2) * grad.array().square().matrix();
    const float c1 = 1 - std::pow(beta1, static_cast<float>(t));
    const float c2 = 1 - std::pow(beta2, static_cast<float>(t));
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

}  // namespace

VectorX<float> gaze_features(const GazeEstimator& estimator, const EyeImage& image,
                             const SegMask* mask) {
  if (estimator.kind == GazeEstimatorKind::kModelBased) {
    require(mask != nullptr, "model-based gaze estimation needs a segmentation mask");
    return normalize_landmarks(extract_landmarks(*mask),
                               static_cast<double>(mask->width()),
                               static_cast<double>(mask->height()));
  }
  require(estimator.extractor != nullptr, "appearance estimator has no extractor");
  const int s = estimator.appearance_input;
  MatrixX<float> input = resize_gray(image.pixels, s);
  input = (input.array() - 0.5f) * 4.0f;  // fixed input scaling of the extractor
  const std::vector<std::string> taps = {kFinalEncodingTap};
  const auto fwd = estimator.extractor->forward(input, s, s, taps);
  return flatten_feature_map(estimator.extractor->tap_feature_map(fwd, kFinalEncodingTap));
}

Eigen::Vector3d predict_gaze(const GazeEstimator& estimator, const EyeImage& image,
                             const SegMask* mask) {
  const VectorX<float> f = gaze_features(estimator, image, mask);
  require(f.size() == estimator.w1.cols(), "gaze feature dimensionality mismatch");
  const VectorX<float> z = (f - estimator.feature_mean).array() * estimator.feature_scale.array();
  const VectorX<float> h = ((estimator.w1 * z) + estimator.b1).cwiseMax(0.0f);
  const VectorX<float> y = (estimator.w2 * h) + estimator.b2;
  Eigen::Vector3d out = y.cast<double>();
  const double norm = out.norm();
  if (norm < 1e-9) return Eigen::Vector3d(0, 0, 1);  // untrained degenerate output
  return out / norm;
}

GazeEstimator train_gaze_estimator(GazeEstimatorKind kind,
                                   const std::vector<const DataRecord*>& train,
                                   const MaskProvider& masks,
                                   const GazeTrainConfig& config) {
  require(!train.empty(), "gaze training needs a nonempty dataset");
  require(config.batch_size > 0 && config.epochs > 0 && config.learning_rate > 0 &&
              config.hidden > 0,
          "gaze train config values must be positive");

  GazeEstimator estimator;
  estimator.kind = kind;
  estimator.appearance_input = config.appearance_input;
  if (kind == GazeEstimatorKind::kAppearanceBased) {
    const auto topology = small_gaze_topology();
    estimator.extractor = std::make_shared<ConvNet<float>>(
        topology, make_random_weights(topology, config.extractor_seed));
  }

  // assemble features and unit targets
  MatrixX<float> features;
  MatrixX<float> targets(3, static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    const DataRecord& rec = *train[i];
    require(rec.gaze.has_value(), "record " + rec.record_id + " has no gaze label");
    const EyeImage image = load_eye_image(rec);
    SegMask mask;
    const SegMask* mask_ptr = nullptr;
    if (kind == GazeEstimatorKind::kModelBased) {
      mask = masks(image, rec);
      mask_ptr = &mask;
    }
    const VectorX<float> f = gaze_features(estimator, image, mask_ptr);
    if (features.size() == 0) features.resize(f.size(), static_cast<Eigen::Index>(train.size()));
    features.col(static_cast<Eigen::Index>(i)) = f;
    targets.col(static_cast<Eigen::Index>(i)) = rec.gaze->vector.cast<float>();
  }

  estimator.feature_mean = features.rowwise().mean();
  estimator.feature_scale.resize(features.rows());
  for (Eigen::Index d = 0; d < features.rows(); ++d) {
    const float var = (features.row(d).array() - estimator.feature_mean(d)).square().mean();
    estimator.feature_scale(d) = 1.0f / std::max(std::sqrt(var), 1e-6f);
  }
  const MatrixX<float> z_all =
      (features.colwise() - estimator.feature_mean).array().colwise() *
      estimator.feature_scale.array();

  const Rng root = Rng(config.seed);
  estimator.w1 = he_matrix(config.hidden, features.rows(), root.fork("gaze-w1"));
  estimator.w2 = he_matrix(3, config.hidden, root.fork("gaze-w2"));
  estimator.b1 = VectorX<float>::Zero(config.hidden);
  estimator.b2 = VectorX<float>::Zero(3);

  Adam opt_w1(estimator.w1), opt_w2(estimator.w2), opt_b1(estimator.b1), opt_b2(estimator.b2);
  const std::size_t n = train.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  int step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = root.fork("gaze-shuffle").fork(static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(config.batch_size)) {
      const Eigen::Index b =
          static_cast<Eigen::Index>(std::min<std::size_t>(config.batch_size, n - begin));
      MatrixX<float> z(z_all.rows(), b), y(3, b);
      for (Eigen::Index c = 0; c < b; ++c) {
        z.col(c) = z_all.col(static_cast<Eigen::Index>(order[begin + static_cast<std::size_t>(c)]));
        y.col(c) = targets.col(static_cast<Eigen::Index>(order[begin + static_cast<std::size_t>(c)]));
      }
      const MatrixX<float> h = ((estimator.w1 * z).colwise() + estimator.b1).cwiseMax(0.0f);
      const MatrixX<float> out = (estimator.w2 * h).colwise() + estimator.b2;

      // mean squared error over all components
      MatrixX<float> dout = 2.0f * (out - y) / static_cast<float>(out.size());
      const MatrixX<float> dw2 = dout * h.transpose();
      const VectorX<float> db2 = dout.rowwise().sum();
      MatrixX<float> dh = estimator.w2.transpose() * dout;
      dh = (h.array() > 0).select(dh, 0.0f);
      const MatrixX<float> dw1 = dh * z.transpose();
      const VectorX<float> db1 = dh.rowwise().sum();

      ++step;
      opt_w1.step(estimator.w1, dw1, config.learning_rate, step);
      opt_w2.step(estimator.w2, dw2, config.learning_rate, step);
      MatrixX<float> b1m = estimator.b1, b2m = estimator.b2;
      opt_b1.step(b1m, db1, config.learning_rate, step);
      opt_b2.step(b2m, db2, config.learning_rate, step);
      estimator.b1 = b1m;
      estimator.b2 = b2m;
    }
  }
  return estimator;
}

GazeEvaluation evaluate_gaze(const GazeEstimator& estimator,
                             const std::vector<const DataRecord*>& records,
                             const MaskProvider& masks, const ImageTransform& transform,
                             int threads) {
  require(!records.empty(), "gaze evaluation needs records");
  GazeEvaluation eval;
  eval.per_record.resize(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const DataRecord& rec = *records[i];
    require(rec.gaze.has_value(), "record " + rec.record_id + " has no gaze label");
    EyeImage image = load_eye_image(rec);
    if (transform) image = transform(image, rec);
    SegMask mask;
    const SegMask* mask_ptr = nullptr;
    if (estimator.kind == GazeEstimatorKind::kModelBased) {
      mask = masks(image, rec);
      mask_ptr = &mask;
    }
    const Eigen::Vector3d pred = predict_gaze(estimator, image, mask_ptr);
    eval.per_record[i] = {rec.record_id, angular_error_degrees(pred, rec.gaze->vector)};
  });
  double sum = 0;
  for (const auto& [id, err] : eval.per_record) sum += err;
  eval.mean_error_deg = sum / static_cast<double>(eval.per_record.size());
  return eval;
}

std::string parameter_checksum(const GazeEstimator& estimator) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto hash_matrix = [&h](const MatrixX<float>& m) {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(m.data());
    for (std::size_t i = 0; i < static_cast<std::size_t>(m.size()) * sizeof(float); ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  hash_matrix(estimator.w1);
  hash_matrix(estimator.w2);
  hash_matrix(estimator.b1);
  hash_matrix(estimator.b2);
  hash_matrix(estimator.feature_mean);
  hash_matrix(estimator.feature_scale);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace iristyle

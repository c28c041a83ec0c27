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

#include "iristyle/recognition/head.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "iristyle/rng.hpp"

namespace iristyle {
namespace {

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
    const float correction1 = 1 - std::pow(beta1, static_cast<float>(t));
    const float correction2 = 1 - std::pow(beta2, static_cast<float>(t));
    param.array() -=
        lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  }
};

MatrixX<float> standardize(const ClassifierHead& head, const MatrixX<float>& features) {
  return (features.colwise() - head.feature_mean).array().colwise() *
         head.feature_scale.array();
}

// logits (K x B) for standardized inputs; optional dropout masks scale the
// hidden activations (inverted dropout).
struct BatchState {
  MatrixX<float> z, h1, h2, logits, probs;
};

void forward_batch(const ClassifierHead& head, const MatrixX<float>& z,
                   const MatrixX<float>* mask1, const MatrixX<float>* mask2,
                   BatchState& state) {
  state.z = z;
  state.h1 = ((head.w1 * z).colwise() + head.b1).cwiseMax(0.0f);
  if (mask1 != nullptr) state.h1.array() *= mask1->array();
  state.h2 = ((head.w2 * state.h1).colwise() + head.b2).cwiseMax(0.0f);
  if (mask2 != nullptr) state.h2.array() *= mask2->array();
  state.logits = (head.w3 * state.h2).colwise() + head.b3;
  state.probs = state.logits;
  for (Eigen::Index c = 0; c < state.probs.cols(); ++c) {
    VectorX<float> col = state.probs.col(c);
    col.array() -= col.maxCoeff();
    col = col.array().exp();
    state.probs.col(c) = col / col.sum();
  }
}

double batch_cross_entropy(const MatrixX<float>& probs, const std::vector<int>& labels,
                           const std::vector<std::size_t>& index, std::size_t begin) {
  double loss = 0;
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    const int label = labels[index[begin + static_cast<std::size_t>(c)]];
    loss -= std::log(std::max(1e-12, static_cast<double>(probs(label, c))));
  }
  return loss / static_cast<double>(probs.cols());
}

}  // namespace

VectorX<float> predict(const ClassifierHead& head, const VectorX<float>& feature) {
  require(feature.size() == head.input_dim(),
          "feature length " + std::to_string(feature.size()) + " does not match head input " +
              std::to_string(head.input_dim()));
  VectorX<float> z =
      (feature - head.feature_mean).array() * head.feature_scale.array();
  VectorX<float> h1 = ((head.w1 * z) + head.b1).cwiseMax(0.0f);
  VectorX<float> h2 = ((head.w2 * h1) + head.b2).cwiseMax(0.0f);
  VectorX<float> logits = (head.w3 * h2) + head.b3;
  logits.array() -= logits.maxCoeff();
  VectorX<float> p = logits.array().exp();
  return p / p.sum();
}

int predict_class(const ClassifierHead& head, const VectorX<float>& feature) {
  Eigen::Index best = 0;
  predict(head, feature).maxCoeff(&best);
  return static_cast<int>(best);
}

TrainedClassifier train_classifier(const MatrixX<float>& train_features,
                                   const std::vector<int>& train_labels,
                                   const MatrixX<float>& test_features,
                                   const std::vector<int>& test_labels,
                                   const TrainConfig& config) {
  const Eigen::Index dim = train_features.rows();
  const std::size_t n = static_cast<std::size_t>(train_features.cols());
  require(n == train_labels.size() && n > 0, "train feature/label count mismatch");
  require(test_features.cols() == static_cast<Eigen::Index>(test_labels.size()),
          "test feature/label count mismatch");
  require(test_features.cols() == 0 || test_features.rows() == dim,
          "test feature dimensionality mismatch");
  require(config.batch_size > 0 && config.epochs > 0 && config.learning_rate > 0 &&
              config.hidden > 0,
          "train config values must be positive");
  require(config.dropout >= 0.0f && config.dropout < 1.0f, "dropout must be in [0,1)");

  const std::set<int> class_set(train_labels.begin(), train_labels.end());
  require(class_set.size() >= 2, "classification needs at least 2 classes, got " +
                                     std::to_string(class_set.size()));
  const int num_classes = *class_set.rbegin() + 1;

  TrainedClassifier out;
  ClassifierHead& head = out.head;
  head.seed = config.seed;
  const Rng root = Rng(config.seed);
  head.w1 = he_matrix(config.hidden, dim, root.fork("init-w1"));
  head.w2 = he_matrix(config.hidden, config.hidden, root.fork("init-w2"));
  head.w3 = he_matrix(num_classes, config.hidden, root.fork("init-w3"));
  head.b1 = VectorX<float>::Zero(config.hidden);
  head.b2 = VectorX<float>::Zero(config.hidden);
  head.b3 = VectorX<float>::Zero(num_classes);

  head.feature_mean = train_features.rowwise().mean();
  head.feature_scale.resize(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    const float var =
        (train_features.row(d).array() - head.feature_mean(d)).square().mean();
    head.feature_scale(d) = 1.0f / std::max(std::sqrt(var), 1e-6f);
  }

  const MatrixX<float> z_train = standardize(head, train_features);
  const MatrixX<float> z_test =
      test_features.cols() > 0 ? standardize(head, test_features) : MatrixX<float>();

  Adam opt_w1(head.w1), opt_w2(head.w2), opt_w3(head.w3);
  Adam opt_b1(head.b1), opt_b2(head.b2), opt_b3(head.b3);
  int step = 0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  const float keep = 1.0f - config.dropout;
  BatchState state;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = root.fork("shuffle").fork(static_cast<std::uint64_t>(epoch));
    Rng dropout_rng = root.fork("dropout").fork(static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0;
    int batches = 0;
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(config.batch_size)) {
      const Eigen::Index b =
          static_cast<Eigen::Index>(std::min<std::size_t>(config.batch_size, n - begin));
      MatrixX<float> z(dim, b);
      for (Eigen::Index c = 0; c < b; ++c)
        z.col(c) = z_train.col(static_cast<Eigen::Index>(order[begin + static_cast<std::size_t>(c)]));

      MatrixX<float> mask1, mask2;
      const MatrixX<float>* m1 = nullptr;
      const MatrixX<float>* m2 = nullptr;
      if (config.dropout > 0) {
        mask1.resize(config.hidden, b);
        mask2.resize(config.hidden, b);
        for (Eigen::Index i = 0; i < mask1.size(); ++i)
          mask1.data()[i] = dropout_rng.uniform() < config.dropout ? 0.0f : 1.0f / keep;
        for (Eigen::Index i = 0; i < mask2.size(); ++i)
          mask2.data()[i] = dropout_rng.uniform() < config.dropout ? 0.0f : 1.0f / keep;
        m1 = &mask1;
        m2 = &mask2;
      }
      forward_batch(head, z, m1, m2, state);
      epoch_loss += batch_cross_entropy(state.probs, train_labels, order, begin);
      ++batches;

      // d(loss)/d(logits) = (p - onehot) / B
      MatrixX<float> dlogits = state.probs;
      for (Eigen::Index c = 0; c < b; ++c)
        dlogits(train_labels[order[begin + static_cast<std::size_t>(c)]], c) -= 1.0f;
      dlogits /= static_cast<float>(b);

      const MatrixX<float> dw3 = dlogits * state.h2.transpose();
      const VectorX<float> db3 = dlogits.rowwise().sum();
      MatrixX<float> dh2 = head.w3.transpose() * dlogits;
      if (m2 != nullptr) dh2.array() *= mask2.array();
      dh2 = (state.h2.array() > 0).select(dh2, 0.0f);

      const MatrixX<float> dw2 = dh2 * state.h1.transpose();
      const VectorX<float> db2 = dh2.rowwise().sum();
      MatrixX<float> dh1 = head.w2.transpose() * dh2;
      if (m1 != nullptr) dh1.array() *= mask1.array();
      dh1 = (state.h1.array() > 0).select(dh1, 0.0f);

      const MatrixX<float> dw1 = dh1 * state.z.transpose();
      const VectorX<float> db1 = dh1.rowwise().sum();

      ++step;
      opt_w1.step(head.w1, dw1, config.learning_rate, step);
      opt_w2.step(head.w2, dw2, config.learning_rate, step);
      opt_w3.step(head.w3, dw3, config.learning_rate, step);
      MatrixX<float> b1m = head.b1, b2m = head.b2, b3m = head.b3;
      opt_b1.step(b1m, db1, config.learning_rate, step);
      opt_b2.step(b2m, db2, config.learning_rate, step);
      opt_b3.step(b3m, db3, config.learning_rate, step);
      head.b1 = b1m;
      head.b2 = b2m;
      head.b3 = b3m;
    }

    EpochStats stats;
    stats.train_loss = epoch_loss / std::max(1, batches);
    if (z_test.cols() > 0) {
      BatchState test_state;
      forward_batch(head, z_test, nullptr, nullptr, test_state);
      std::vector<int> predicted(test_labels.size());
      double loss = 0;
      for (Eigen::Index c = 0; c < test_state.probs.cols(); ++c) {
        Eigen::Index best = 0;
        test_state.probs.col(c).maxCoeff(&best);
        predicted[static_cast<std::size_t>(c)] = static_cast<int>(best);
        loss -= std::log(std::max(
            1e-12, static_cast<double>(test_state.probs(test_labels[static_cast<std::size_t>(c)], c))));
      }
      stats.test_loss = loss / static_cast<double>(test_labels.size());
      const auto metrics = compute_metrics(num_classes, test_labels, predicted);
      stats.test_accuracy = metrics.accuracy;
      stats.test_f1 = metrics.macro_f1;
      stats.test_mcc = metrics.mcc;
    }
    out.history.push_back(stats);
  }
  return out;
}

RecognitionMetrics evaluate(const ClassifierHead& head, const MatrixX<float>& features,
                            const std::vector<int>& labels) {
  require(features.cols() == static_cast<Eigen::Index>(labels.size()) && !labels.empty(),
          "evaluate needs matched nonempty features/labels");
  std::vector<int> predicted(labels.size());
  for (Eigen::Index c = 0; c < features.cols(); ++c)
    predicted[static_cast<std::size_t>(c)] = predict_class(head, features.col(c));
  return compute_metrics(head.num_classes(), labels, predicted);
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t bytes) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void write_matrix(std::ofstream& f, const MatrixX<float>& m) {
  const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  f.write(reinterpret_cast<const char*>(&rows), 4);
  f.write(reinterpret_cast<const char*>(&cols), 4);
  f.write(reinterpret_cast<const char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(float)));
}

MatrixX<float> read_matrix(std::ifstream& f, const std::string& path) {
  std::uint32_t rows = 0, cols = 0;
  f.read(reinterpret_cast<char*>(&rows), 4);
  f.read(reinterpret_cast<char*>(&cols), 4);
  require(f.good() && rows <= (1u << 20) && cols <= (1u << 20),
          "classifier checkpoint corrupt: " + path);
  MatrixX<float> m(rows, cols);
  f.read(reinterpret_cast<char*>(m.data()),
         static_cast<std::streamsize>(m.size() * sizeof(float)));
  require(f.good(), "classifier checkpoint truncated: " + path);
  return m;
}

}  // namespace

std::string parameter_checksum(const ClassifierHead& head) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const MatrixX<float>* m : {&head.w1, &head.w2, &head.w3})
    hash_bytes(h, m->data(), static_cast<std::size_t>(m->size()) * sizeof(float));
  for (const VectorX<float>* v :
       {&head.b1, &head.b2, &head.b3, &head.feature_mean, &head.feature_scale})
    hash_bytes(h, v->data(), static_cast<std::size_t>(v->size()) * sizeof(float));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_classifier(const ClassifierHead& head, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "cannot write classifier checkpoint: " + path);
  f.write("ISLH", 4);
  const std::uint16_t version = 1;
  f.write(reinterpret_cast<const char*>(&version), 2);
  const std::uint32_t input_dim = static_cast<std::uint32_t>(head.input_dim());
  const std::uint32_t classes = static_cast<std::uint32_t>(head.num_classes());
  f.write(reinterpret_cast<const char*>(&input_dim), 4);
  f.write(reinterpret_cast<const char*>(&classes), 4);
  f.write(reinterpret_cast<const char*>(&head.seed), 8);
  write_matrix(f, head.w1);
  write_matrix(f, head.w2);
  write_matrix(f, head.w3);
  write_matrix(f, head.b1);
  write_matrix(f, head.b2);
  write_matrix(f, head.b3);
  write_matrix(f, head.feature_mean);
  write_matrix(f, head.feature_scale);
  require(f.good(), "short write: " + path);
}

ClassifierHead load_classifier(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open classifier checkpoint: " + path);
  char magic[4];
  f.read(magic, 4);
  require(f.good() && std::string_view(magic, 4) == "ISLH",
          "not a classifier checkpoint: " + path);
  std::uint16_t version = 0;
  f.read(reinterpret_cast<char*>(&version), 2);
  require(version == 1, "unsupported checkpoint version in " + path);
  std::uint32_t input_dim = 0, classes = 0;
  f.read(reinterpret_cast<char*>(&input_dim), 4);
  f.read(reinterpret_cast<char*>(&classes), 4);
  ClassifierHead head;
  f.read(reinterpret_cast<char*>(&head.seed), 8);
  head.w1 = read_matrix(f, path);
  head.w2 = read_matrix(f, path);
  head.w3 = read_matrix(f, path);
  head.b1 = read_matrix(f, path);
  head.b2 = read_matrix(f, path);
  head.b3 = read_matrix(f, path);
  head.feature_mean = read_matrix(f, path);
  head.feature_scale = read_matrix(f, path);
  require(head.input_dim() == static_cast<Eigen::Index>(input_dim) &&
              head.num_classes() == static_cast<int>(classes),
          "checkpoint header does not match its payload: " + path);
  return head;
}

}  // namespace iristyle

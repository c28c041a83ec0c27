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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "iristyle/backbone/backbone.hpp"
#include "iristyle/transfer/losses.hpp"

using namespace iristyle;

namespace {

WeightsFile& test_weights() {
  static WeightsFile w = make_random_weights(vgg19_topology(), 42);
  return w;
}

Backbone<double>& test_backbone_d() {
  static Backbone<double> bb(vgg19_topology(), test_weights(), 64);
  return bb;
}

MatrixX<double> random_input(int size, std::uint64_t seed) {
  Rng rng(seed);
  MatrixX<double> in(static_cast<Eigen::Index>(size) * size, 3);
  for (Eigen::Index i = 0; i < in.size(); ++i)
    in.data()[i] = rng.uniform(-2.0, 2.0);
  return in;
}

}  // namespace

TEST_SUITE_BEGIN("backbone");

TEST_CASE("vgg19 taps report the canonical channel widths") {
  const ConvNet<float> net(vgg19_topology(), test_weights());
  CHECK(net.tap_channels("relu1_1") == 64);
  CHECK(net.tap_channels("relu2_1") == 128);
  CHECK(net.tap_channels("relu3_1") == 256);
  CHECK(net.tap_channels("relu4_1") == 512);
  CHECK(net.tap_channels("relu4_2") == 512);
  CHECK(net.tap_channels("relu5_1") == 512);
  CHECK(net.tap_channels("final_encoding") == 512);
  CHECK_THROWS_AS((void)net.tap_channels("relu9_9"), Error);
}

TEST_CASE("weights files round-trip and reject corruption") {
  const auto dir = testing::scratch_dir("weights");
  const auto path = (dir / "w.isbw").string();
  test_weights().save(path);

  const WeightsFile loaded = WeightsFile::load(path);
  CHECK(loaded.checksum() == test_weights().checksum());
  CHECK(loaded.convs.size() == 16);

  // truncation
  const auto short_path = (dir / "short.isbw").string();
  {
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    std::ofstream out(short_path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS((void)WeightsFile::load(short_path), Error);

  // topology mismatch names the expected and found shapes
  const auto small = make_random_weights(small_gaze_topology(), 1);
  CHECK_THROWS_WITH_AS((void)ConvNet<float>(vgg19_topology(), small),
                       doctest::Contains("expected conv1_1"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("two handles over equal weights produce identical activations") {
  const Backbone<float> a(vgg19_topology(), test_weights(), 64);
  const Backbone<float> b(vgg19_topology(), test_weights(), 64);
  CHECK(a.checksum() == b.checksum());

  MatrixX<float> in = random_input(64, 3).cast<float>();
  const std::vector<std::string> taps = {"relu3_1"};
  const auto fa = a.net().forward(in, 64, 64, taps);
  const auto fb = b.net().forward(in, 64, 64, taps);
  CHECK(a.net().tap_output(fa, "relu3_1") == b.net().tap_output(fb, "relu3_1"));
}

TEST_CASE("block 1 preserves spatial size and activations stay finite") {
  const auto& bb = test_backbone_d();
  const std::vector<std::string> taps = {"relu1_1"};
  const auto fwd = bb.net().forward(random_input(64, 5), 64, 64, taps);
  const auto map = bb.net().tap_feature_map(fwd, "relu1_1");
  CHECK(map.height == 64);
  CHECK(map.width == 64);
  CHECK(map.channels() == 64);
  CHECK(map.values.allFinite());
  CHECK(map.values.minCoeff() >= 0.0);

  const MatrixX<double> zeros = MatrixX<double>::Zero(64 * 64, 3);
  const auto fz = bb.net().forward(zeros, 64, 64, taps);
  CHECK(bb.net().tap_output(fz, "relu1_1").allFinite());
}

TEST_CASE("constant objective (no injected gradient) has zero input gradient") {
  const auto& bb = test_backbone_d();
  const std::vector<std::string> taps = {"relu2_1"};
  const auto fwd = bb.net().forward(random_input(64, 8), 64, 64, taps);
  const auto grad = bb.net().input_gradient(fwd, 64, 64, {});
  CHECK(grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("content objective against itself has zero gradient") {
  const auto& bb = test_backbone_d();
  const auto in = random_input(64, 9);
  const std::vector<std::string> taps = {"relu4_2"};
  const auto fwd = bb.net().forward(in, 64, 64, taps);
  const auto x_map = bb.net().tap_feature_map(fwd, "relu4_2");

  MatrixX<double> g;
  const double loss = content_loss_grad(x_map, x_map, g);
  CHECK(loss == 0.0);
  const auto input_grad = bb.net().input_gradient(fwd, 64, 64, {{"relu4_2", g}});
  CHECK(input_grad.cwiseAbs().maxCoeff() <= 1e-6);
}

// Central-difference oracle for d(objective)/d(input) at one pixel.
template <typename Objective>
double central_difference(const Backbone<double>& bb, MatrixX<double> in, int size,
                          const std::vector<std::string>& taps, Eigen::Index flat,
                          const Objective& objective, double step = 1e-3) {
  in(flat / 3, flat % 3) += step;
  const double hi = objective(bb.net().forward(in, size, size, taps));
  in(flat / 3, flat % 3) -= 2 * step;
  const double lo = objective(bb.net().forward(in, size, size, taps));
  return (hi - lo) / (2 * step);
}

TEST_CASE("analytic input gradients match central differences") {
  const auto& bb = test_backbone_d();
  const int size = 64;
  const auto in = random_input(size, 13);

  // fixed targets from a second random input
  const auto ref_in = random_input(size, 14);
  const std::vector<std::string> taps = {"relu1_1", "relu2_1", "relu3_1", "relu4_1",
                                         "relu4_2"};
  const auto ref_fwd = bb.net().forward(ref_in, size, size, taps);
  const FeatureMap<double> content_ref = bb.net().tap_feature_map(ref_fwd, "relu4_2");
  std::vector<ChannelStats<double>> style_ref;
  const std::vector<std::string> style_taps = {"relu1_1", "relu2_1", "relu3_1", "relu4_1"};
  for (const auto& t : style_taps)
    style_ref.push_back(channel_stats(bb.net().tap_feature_map(ref_fwd, t)));

  const double alpha = 1.0, beta = 1.0;
  auto objective = [&](const ConvNet<double>::Forward& fwd) {
    double total = alpha * content_loss(content_ref, bb.net().tap_feature_map(fwd, "relu4_2"));
    for (std::size_t l = 0; l < style_taps.size(); ++l)
      total += beta * 0.25 *
               style_loss_tap(style_ref[l],
                              channel_stats(bb.net().tap_feature_map(fwd, style_taps[l])));
    return total;
  };

  // analytic gradient
  const auto fwd = bb.net().forward(in, size, size, taps);
  std::map<std::string, MatrixX<double>> tap_grads;
  {
    MatrixX<double> g;
    content_loss_grad(content_ref, bb.net().tap_feature_map(fwd, "relu4_2"), g);
    tap_grads["relu4_2"] = alpha * g;
    for (std::size_t l = 0; l < style_taps.size(); ++l) {
      MatrixX<double> sg;
      style_loss_tap_grad(style_ref[l], bb.net().tap_feature_map(fwd, style_taps[l]), sg);
      tap_grads[style_taps[l]] = beta * 0.25 * sg;
    }
  }
  const MatrixX<double> analytic = bb.net().input_gradient(fwd, size, size, tap_grads);

  Rng rng(99);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index flat =
        static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(analytic.size())));
    const double numeric = central_difference(bb, in, size, taps, flat, objective);
    const double got = analytic(flat / 3, flat % 3);
    CHECK(got == doctest::Approx(numeric).epsilon(1e-3));
  }
}

TEST_CASE("sum-of-activations objective matches central differences") {
  const auto& bb = test_backbone_d();
  const int size = 64;
  const auto in = random_input(size, 21);
  const std::vector<std::string> taps = {"relu1_1"};

  auto objective = [&](const ConvNet<double>::Forward& fwd) {
    return bb.net().tap_output(fwd, "relu1_1").sum();
  };
  const auto fwd = bb.net().forward(in, size, size, taps);
  const auto& out = bb.net().tap_output(fwd, "relu1_1");
  const MatrixX<double> analytic =
      bb.net().input_gradient(fwd, size, size,
                              {{"relu1_1", MatrixX<double>::Ones(out.rows(), out.cols())}});

  Rng rng(77);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index flat =
        static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(analytic.size())));
    const double numeric = central_difference(bb, in, size, taps, flat, objective);
    CHECK(analytic(flat / 3, flat % 3) == doctest::Approx(numeric).epsilon(1e-3));
  }
}

TEST_CASE("gradient calls leave the weights untouched") {
  const Backbone<double> bb(vgg19_topology(), test_weights(), 64);
  const auto in = random_input(64, 30);
  const std::vector<std::string> taps = {"relu2_1"};
  const auto before = bb.net().forward(in, 64, 64, taps);
  const MatrixX<double> out_before = bb.net().tap_output(before, "relu2_1");

  for (int i = 0; i < 3; ++i) {
    const auto fwd = bb.net().forward(in, 64, 64, taps);
    (void)bb.net().input_gradient(
        fwd, 64, 64,
        {{"relu2_1", MatrixX<double>::Ones(out_before.rows(), out_before.cols())}});
  }
  const auto after = bb.net().forward(in, 64, 64, taps);
  CHECK(bb.net().tap_output(after, "relu2_1") == out_before);
  CHECK(bb.checksum() == test_weights().checksum());
}

TEST_CASE("prepare_input replicates the gray plane and normalizes per channel") {
  const auto eye = testing::make_tiny_eye();
  const auto crop = extract_iris<double>(eye.image, eye.mask, 250);
  const Backbone<double>& bb = test_backbone_d();
  const MatrixX<double> prep = bb.prepare_input(crop, 48);
  CHECK(prep.rows() == 48 * 48);
  CHECK(prep.cols() == 3);
  CHECK(prep.allFinite());
  for (int c = 0; c < 3; ++c) {
    const VectorX<double> denorm =
        prep.col(c) * double(kInputStd[c]) + VectorX<double>::Constant(prep.rows(), kInputMean[c]);
    const VectorX<double> denorm0 =
        prep.col(0) * double(kInputStd[0]) + VectorX<double>::Constant(prep.rows(), kInputMean[0]);
    CHECK((denorm - denorm0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("prepare_input at the source size is an exact identity resize") {
  IrisCrop<double> crop;
  crop.pixels.setRandom(48, 48);
  crop.pixels = (crop.pixels.array() + 1.0) / 2.0;
  crop.bbox = {0, 0, 48, 48};
  const InputPipeline<double> pipeline(48, 48, 48);
  const MatrixX<double> prep = pipeline.forward(crop.pixels);
  for (Eigen::Index p = 0; p < prep.rows(); ++p) {
    const double gray = crop.pixels(p / 48, p % 48);
    CHECK(prep(p, 1) == (gray - double(kInputMean[1])) / double(kInputStd[1]));
  }
}

TEST_CASE("prepare_input rejects sizes below 32") {
  const auto eye = testing::make_tiny_eye();
  const auto crop = extract_iris<double>(eye.image, eye.mask, 250);
  CHECK_THROWS_AS((void)test_backbone_d().prepare_input(crop, 16), Error);
}

TEST_SUITE_END();

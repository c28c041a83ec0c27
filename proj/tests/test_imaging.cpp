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

#include <set>

#include "helpers.hpp"
#include "iristyle/imaging/iris.hpp"
#include "iristyle/imaging/warp.hpp"

using namespace iristyle;
using testing::make_tiny_eye;

TEST_SUITE_BEGIN("imaging");

TEST_CASE("extract_iris records exactly the saturated iris pixels as glints") {
  const auto eye = make_tiny_eye();
  const auto crop = extract_iris<float>(eye.image, eye.mask, 250);

  std::set<std::pair<Eigen::Index, Eigen::Index>> expected;
  for (const auto& [y, x] : eye.glint_pixels)
    expected.insert({y - crop.bbox.row0, x - crop.bbox.col0});
  std::set<std::pair<Eigen::Index, Eigen::Index>> got(crop.glints.coordinates.begin(),
                                                      crop.glints.coordinates.end());
  CHECK(got == expected);
  for (auto v : crop.glints.original_values) CHECK(v == 255);

  // glints excluded from validity, and validity only on iris pixels
  for (const auto& [gy, gx] : crop.glints.coordinates) CHECK(crop.validity(gy, gx) == 0);
  for (Eigen::Index y = 0; y < crop.height(); ++y)
    for (Eigen::Index x = 0; x < crop.width(); ++x) {
      const auto label = eye.mask.labels(crop.bbox.row0 + y, crop.bbox.col0 + x);
      if (crop.validity(y, x) != 0) CHECK(label == kClassIris);
      if (label != kClassIris) CHECK(crop.pixels(y, x) == 0.0f);
    }
}

TEST_CASE("extract_iris with an all-iris mask is a pure rescale") {
  EyeImage image;
  image.pixels.setZero(40, 40);
  for (Eigen::Index y = 0; y < 40; ++y)
    for (Eigen::Index x = 0; x < 40; ++x)
      image.pixels(y, x) = static_cast<std::uint8_t>((y * 40 + x) % 240);
  SegMask mask;
  mask.labels.setConstant(40, 40, kClassIris);

  const auto crop = extract_iris<double>(image, mask, 250);
  CHECK(crop.bbox == CropBox{0, 0, 40, 40});
  CHECK(crop.glints.empty());
  for (Eigen::Index y = 0; y < 40; ++y)
    for (Eigen::Index x = 0; x < 40; ++x)
      CHECK(crop.pixels(y, x) == doctest::Approx(image.pixels(y, x) / 255.0).epsilon(1e-12));
}

TEST_CASE("extract_iris rejects empty and tiny iris regions") {
  auto eye = make_tiny_eye();
  SegMask empty;
  empty.labels.setZero(eye.image.height(), eye.image.width());
  CHECK_THROWS_AS((void)extract_iris<float>(eye.image, empty), Error);

  SegMask tiny = empty;
  for (Eigen::Index i = 0; i < 8; ++i) tiny.labels(30, 30 + i) = kClassIris;
  CHECK_THROWS_WITH_AS((void)extract_iris<float>(eye.image, tiny),
                       doctest::Contains("iris region too small"), Error);
}

TEST_CASE("extract then reinsert is bit-exact, glints included") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto eye = make_tiny_eye(64, 96, seed);
    const auto crop = extract_iris<float>(eye.image, eye.mask, 250);
    const EyeImage back = reinsert(eye.image, crop, eye.mask);
    CHECK(back.pixels == eye.image.pixels);
  }
}

TEST_CASE("reinsert writes round(v*255) on iris pixels and nothing else") {
  const auto eye = make_tiny_eye();
  auto crop = extract_iris<float>(eye.image, eye.mask, 250);
  crop.pixels.setConstant(0.5f);
  const EyeImage out = reinsert(eye.image, crop, eye.mask);

  std::set<std::pair<Eigen::Index, Eigen::Index>> glints(eye.glint_pixels.begin(),
                                                         eye.glint_pixels.end());
  for (Eigen::Index y = 0; y < eye.image.height(); ++y)
    for (Eigen::Index x = 0; x < eye.image.width(); ++x) {
      if (eye.mask.labels(y, x) != kClassIris)
        CHECK(out.pixels(y, x) == eye.image.pixels(y, x));
      else if (glints.count({y, x}))
        CHECK(out.pixels(y, x) == 255);
      else
        CHECK(out.pixels(y, x) == 128);
    }
}

TEST_CASE("reinsert rejects a bbox mismatch") {
  const auto eye = make_tiny_eye();
  auto crop = extract_iris<float>(eye.image, eye.mask, 250);
  crop.bbox.row0 += 1;
  CHECK_THROWS_AS((void)reinsert(eye.image, crop, eye.mask), Error);
}

TEST_CASE("random_rotation: zero degrees is the identity") {
  const auto eye = make_tiny_eye();
  const auto crop = extract_iris<float>(eye.image, eye.mask, 250);
  Rng rng(5);
  const auto rotated = random_rotation(crop, 0.0, rng);
  CHECK(rotated.pixels == crop.pixels);
  CHECK(rotated.validity == crop.validity);
}

TEST_CASE("random_rotation preserves dimensions and is seed-deterministic") {
  const auto eye = make_tiny_eye();
  const auto crop = extract_iris<float>(eye.image, eye.mask, 250);
  Rng a(11), b(11), c(12);
  const auto r1 = random_rotation(crop, 180.0, a);
  const auto r2 = random_rotation(crop, 180.0, b);
  const auto r3 = random_rotation(crop, 180.0, c);
  CHECK(r1.height() == crop.height());
  CHECK(r1.width() == crop.width());
  CHECK(r1.pixels == r2.pixels);
  CHECK((r1.pixels - r3.pixels).cwiseAbs().maxCoeff() > 0.0f);
}

TEST_CASE("rotation fills from outside the source with exact zeros") {
  IrisCrop<float> ones;
  ones.pixels.setOnes(33, 33);
  ones.validity.setConstant(33, 33, 1);
  ones.bbox = {0, 0, 33, 33};
  Rng rng(3);
  const auto rotated = random_rotation(ones, 45.0, rng);
  CHECK(rotated.pixels(0, 0) == 0.0f);  // the corner leaves the frame
  CHECK(rotated.validity(0, 0) == 0);
  CHECK(rotated.pixels(16, 16) == doctest::Approx(1.0f));  // center fixed point
}

TEST_CASE("homography of four un-displaced corners is the identity") {
  const std::array<Eigen::Vector2d, 4> corners = {
      Eigen::Vector2d(0, 0), Eigen::Vector2d(59, 0), Eigen::Vector2d(59, 43),
      Eigen::Vector2d(0, 43)};
  const Eigen::Matrix3d H = homography_from_corners(corners, corners);
  CHECK((H - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("homography maps corners onto their displaced targets") {
  Rng rng(21);
  const std::array<Eigen::Vector2d, 4> from = {
      Eigen::Vector2d(0, 0), Eigen::Vector2d(80, 0), Eigen::Vector2d(80, 50),
      Eigen::Vector2d(0, 50)};
  std::array<Eigen::Vector2d, 4> to;
  for (int i = 0; i < 4; ++i)
    to[i] = from[i] + Eigen::Vector2d(rng.uniform(-6, 6), rng.uniform(-6, 6));
  const Eigen::Matrix3d H = homography_from_corners(from, to);
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d p = H * Eigen::Vector3d(from[i].x(), from[i].y(), 1.0);
    CHECK(p.x() / p.z() == doctest::Approx(to[i].x()).epsilon(1e-9));
    CHECK(p.y() / p.z() == doctest::Approx(to[i].y()).epsilon(1e-9));
  }
}

TEST_CASE("random_perspective: degree 0 is the identity up to solver noise") {
  const auto eye = make_tiny_eye();
  const auto crop = extract_iris<double>(eye.image, eye.mask, 250);
  Rng rng(9);
  const auto warped = random_perspective(crop, 0.0, rng);
  CHECK((warped.pixels - crop.pixels).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("perspective corner displacement is bounded by degree * half-size") {
  Rng rng(33);
  const Eigen::Index h = 50, w = 70;
  const auto base = image_corners(h, w);
  for (int trial = 0; trial < 200; ++trial) {
    const auto moved = perspective_corners(h, w, 1.0, rng);
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector2d d = (moved[i] - base[i]).cwiseAbs();
      CHECK(d.x() <= w / 2.0);
      CHECK(d.y() <= h / 2.0);
    }
  }
  const auto still = perspective_corners(h, w, 0.0, rng);
  for (int i = 0; i < 4; ++i) CHECK((still[i] - base[i]).norm() == 0.0);
}

TEST_CASE("random_perspective is seed-deterministic and preserves dims") {
  const auto eye = make_tiny_eye();
  const auto crop = extract_iris<float>(eye.image, eye.mask, 250);
  Rng a(4), b(4);
  const auto w1 = random_perspective(crop, 0.7, a);
  const auto w2 = random_perspective(crop, 0.7, b);
  CHECK(w1.pixels == w2.pixels);
  CHECK(w1.height() == crop.height());
  CHECK(w1.width() == crop.width());
}

TEST_SUITE_END();

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

#ifndef IRISTYLE_TESTS_HELPERS_HPP_
#define IRISTYLE_TESTS_HELPERS_HPP_

#include <filesystem>
#include <string>

#include "iristyle/image.hpp"
#include "iristyle/rng.hpp"

namespace iristyle::testing {

/// Hand-built eye raster for imaging tests: concentric pupil/iris discs inside
/// an elliptic opening, textured iris, and two 2x2 glint blocks at 255.
struct TinyEye {
  EyeImage image;
  SegMask mask;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> glint_pixels;  // absolute coords
};

inline TinyEye make_tiny_eye(Eigen::Index h = 64, Eigen::Index w = 96,
                             std::uint64_t seed = 7, bool with_glints = true) {
  TinyEye eye;
  eye.image.pixels.setConstant(h, w, 140);
  eye.image.user_id = "u0";
  eye.image.record_id = "tiny";
  eye.mask.labels.setZero(h, w);

  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  const double opening_a = w * 0.42, opening_b = h * 0.38;
  const double iris_r = h * 0.34, pupil_r = h * 0.13;
  Rng rng(seed);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      const bool open = dx * dx / (opening_a * opening_a) + dy * dy / (opening_b * opening_b) <= 1.0;
      if (!open) continue;
      const double r = std::sqrt(dx * dx + dy * dy);
      if (r <= pupil_r) {
        eye.mask.labels(y, x) = kClassPupil;
        eye.image.pixels(y, x) = 25;
      } else if (r <= iris_r) {
        eye.mask.labels(y, x) = kClassIris;
        eye.image.pixels(y, x) =
            static_cast<std::uint8_t>(70 + (static_cast<int>(x + 2 * y) % 23) * 5 +
                                      static_cast<int>(rng.uniform_index(8)));
      } else {
        eye.mask.labels(y, x) = kClassSclera;
        eye.image.pixels(y, x) = 225;
      }
    }
  if (with_glints) {
    // two 2x2 saturated blocks placed on iris pixels, offset from the pupil
    const Eigen::Index gy = static_cast<Eigen::Index>(cy - iris_r * 0.6);
    const Eigen::Index gx1 = static_cast<Eigen::Index>(cx - iris_r * 0.35);
    const Eigen::Index gx2 = static_cast<Eigen::Index>(cx + iris_r * 0.25);
    for (Eigen::Index oy = 0; oy < 2; ++oy)
      for (Eigen::Index ox = 0; ox < 2; ++ox)
        for (Eigen::Index gx : {gx1, gx2}) {
          if (eye.mask.labels(gy + oy, gx + ox) != kClassIris) continue;
          eye.image.pixels(gy + oy, gx + ox) = 255;
          eye.glint_pixels.emplace_back(gy + oy, gx + ox);
        }
  }
  return eye;
}

/// Unique scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("iristyle-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace iristyle::testing

#endif  // IRISTYLE_TESTS_HELPERS_HPP_

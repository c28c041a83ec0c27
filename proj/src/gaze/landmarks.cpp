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

#include "iristyle/gaze/landmarks.hpp"

#include "iristyle/gaze/ellipse.hpp"

namespace iristyle {

std::vector<Eigen::Vector2d> region_boundary(const SegMask& mask, std::uint8_t min_class) {
  const Eigen::Index h = mask.height(), w = mask.width();
  std::vector<Eigen::Vector2d> boundary;
  auto inside = [&](Eigen::Index y, Eigen::Index x) {
    return y >= 0 && y < h && x >= 0 && x < w && mask.labels(y, x) >= min_class;
  };
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      if (mask.labels(y, x) < min_class) continue;
      if (!inside(y - 1, x) || !inside(y + 1, x) || !inside(y, x - 1) || !inside(y, x + 1))
        boundary.emplace_back(static_cast<double>(x), static_cast<double>(y));
    }
  return boundary;
}

VectorX<double> extract_landmarks(const SegMask& mask) {
  require(mask.labels.size() > 0, "empty mask");
  Eigen::Index pupil_count = 0, iris_count = 0, sclera_count = 0;
  Eigen::Index left_x = mask.width(), left_y = 0, right_x = -1, right_y = 0;
  for (Eigen::Index y = 0; y < mask.height(); ++y)
    for (Eigen::Index x = 0; x < mask.width(); ++x) {
      const std::uint8_t label = mask.labels(y, x);
      if (label == kClassPupil) ++pupil_count;
      if (label >= kClassIris) ++iris_count;
      if (label == kClassSclera) ++sclera_count;
      if (label >= kClassSclera) {
        if (x < left_x || (x == left_x && y < left_y)) {
          left_x = x;
          left_y = y;
        }
        if (x > right_x || (x == right_x && y < right_y)) {
          right_x = x;
          right_y = y;
        }
      }
    }
  require(pupil_count > 0, "mask has no pupil class");
  require(iris_count > pupil_count, "mask has no iris class");

  const Ellipse pupil = fit_ellipse(region_boundary(mask, kClassPupil));
  const Ellipse iris = fit_ellipse(region_boundary(mask, kClassIris));
  const double area = static_cast<double>(mask.labels.size());

  VectorX<double> landmarks(kNumLandmarks);
  landmarks << pupil.cx, pupil.cy, pupil.a, pupil.b, pupil.theta,
      static_cast<double>(pupil_count) / area,                       //
      iris.cx, iris.cy, iris.a, iris.b, iris.theta,                  //
      static_cast<double>(iris_count) / area,                        //
      pupil.cx - iris.cx, pupil.cy - iris.cy,                        //
      static_cast<double>(left_x), static_cast<double>(left_y),      //
      static_cast<double>(right_x), static_cast<double>(right_y),    //
      static_cast<double>(sclera_count) / area;
  require(landmarks.allFinite(), "landmark extraction produced non-finite values");
  return landmarks;
}

}  // namespace iristyle

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

#ifndef IRISTYLE_IMAGE_HPP_
#define IRISTYLE_IMAGE_HPP_

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "iristyle/common.hpp"

namespace iristyle {

/// 8-bit raster, rows = image rows (y), cols = image columns (x).
using ImageU8 =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raw grayscale sensor record with identity metadata.
struct EyeImage {
  ImageU8 pixels;
  std::string user_id;
  std::string record_id;

  Eigen::Index height() const { return pixels.rows(); }
  Eigen::Index width() const { return pixels.cols(); }
};

/// Per-pixel class values of a segmentation mask.
enum EyeClass : std::uint8_t {
  kClassSkin = 0,    // skin and background
  kClassSclera = 1,
  kClassIris = 2,
  kClassPupil = 3,
};
constexpr int kNumEyeClasses = 4;

/// Per-pixel class map aligned with an EyeImage.
struct SegMask {
  ImageU8 labels;

  Eigen::Index height() const { return labels.rows(); }
  Eigen::Index width() const { return labels.cols(); }
};

inline void check_eye_image(const EyeImage& image) {
  require(image.height() >= 32 && image.width() >= 32,
          "eye image must be at least 32x32, got " +
              std::to_string(image.height()) + "x" + std::to_string(image.width()));
}

inline void check_mask_matches(const EyeImage& image, const SegMask& mask) {
  require(image.height() == mask.height() && image.width() == mask.width(),
          "segmentation mask shape does not match image");
  require((mask.labels.array() <= kClassPupil).all(),
          "segmentation mask holds a class value outside {0,1,2,3}");
}

}  // namespace iristyle

#endif  // IRISTYLE_IMAGE_HPP_

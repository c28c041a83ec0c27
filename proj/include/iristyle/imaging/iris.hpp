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

#ifndef IRISTYLE_IMAGING_IRIS_HPP_
#define IRISTYLE_IMAGING_IRIS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "iristyle/common.hpp"
#include "iristyle/image.hpp"

namespace iristyle {

/// Near-saturation sensor reflections found inside the iris. Coordinates are
/// crop-relative; original intensities are kept so reinsertion is exact.
struct GlintMap {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> coordinates;  // (row, col)
  std::vector<std::uint8_t> original_values;

  std::size_t size() const { return coordinates.size(); }
  bool empty() const { return coordinates.empty(); }
};

struct CropBox {
  Eigen::Index row0 = 0, col0 = 0, height = 0, width = 0;
  friend bool operator==(const CropBox&, const CropBox&) = default;
};

/// Iris texture in [0,1], tight around the iris class, with the pixels that
/// may be trusted for statistics flagged in `validity` (iris minus glints).
template <typename Scalar>
struct IrisCrop {
  MatrixX<Scalar> pixels;  // height x width, [0,1]
  CropBox bbox;            // placement in the source image
  ImageU8 validity;        // 1 = valid iris pixel
  GlintMap glints;

  Eigen::Index height() const { return pixels.rows(); }
  Eigen::Index width() const { return pixels.cols(); }
};

constexpr int kDefaultGlintThreshold = 250;
constexpr Eigen::Index kMinIrisPixels = 64;

/// Mask out the non-iris region, trim to the iris bounding box, record and
/// in-paint glints, and scale to [0,1].
template <typename Scalar = float>
IrisCrop<Scalar> extract_iris(const EyeImage& image, const SegMask& mask,
                              int glint_threshold = kDefaultGlintThreshold) {
  check_eye_image(image);
  check_mask_matches(image, mask);
  require(glint_threshold > 0 && glint_threshold <= 255,
          "glint threshold must be in (0,255]");

  const Eigen::Index h = image.height(), w = image.width();
  Eigen::Index r0 = h, r1 = -1, c0 = w, c1 = -1, iris_count = 0;
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      if (mask.labels(y, x) == kClassIris) {
        ++iris_count;
        r0 = std::min(r0, y);
        r1 = std::max(r1, y);
        c0 = std::min(c0, x);
        c1 = std::max(c1, x);
      }
  require(iris_count > 0, "iris region is empty in record " + image.record_id);
  require(iris_count >= kMinIrisPixels,
          "iris region too small (" + std::to_string(iris_count) + " px) in record " +
              image.record_id);

  IrisCrop<Scalar> crop;
  crop.bbox = {r0, c0, r1 - r0 + 1, c1 - c0 + 1};
  crop.pixels.setZero(crop.bbox.height, crop.bbox.width);
  crop.validity.setZero(crop.bbox.height, crop.bbox.width);

  std::vector<Scalar> valid_values;
  valid_values.reserve(static_cast<std::size_t>(iris_count));
  for (Eigen::Index y = r0; y <= r1; ++y)
    for (Eigen::Index x = c0; x <= c1; ++x) {
      if (mask.labels(y, x) != kClassIris) continue;
      const std::uint8_t v = image.pixels(y, x);
      if (static_cast<int>(v) >= glint_threshold) {
        crop.glints.coordinates.emplace_back(y - r0, x - c0);
        crop.glints.original_values.push_back(v);
      } else {
        crop.pixels(y - r0, x - c0) = Scalar(v) / Scalar(255);
        crop.validity(y - r0, x - c0) = 1;
        valid_values.push_back(Scalar(v) / Scalar(255));
      }
    }

  // Replace glints by the median valid intensity so the downstream channel
  // statistics are not skewed by saturated pixels.
  Scalar median = Scalar(0);
  if (!valid_values.empty()) {
    const std::size_t mid = valid_values.size() / 2;
    std::nth_element(valid_values.begin(), valid_values.begin() + mid, valid_values.end());
    median = valid_values[mid];
    if (valid_values.size() % 2 == 0) {
      const auto lower = std::max_element(valid_values.begin(), valid_values.begin() + mid);
      median = (*lower + median) / Scalar(2);
    }
  }
  for (const auto& [gy, gx] : crop.glints.coordinates) crop.pixels(gy, gx) = median;
  return crop;
}

/// Write a (stylized) crop back into its source image. Only iris-class pixels
/// inside the bbox change; glints are restored to their recorded intensities.
template <typename Scalar>
EyeImage reinsert(const EyeImage& original, const IrisCrop<Scalar>& stylized,
                  const SegMask& mask) {
  check_mask_matches(original, mask);
  const Eigen::Index h = original.height(), w = original.width();
  Eigen::Index r0 = h, r1 = -1, c0 = w, c1 = -1;
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      if (mask.labels(y, x) == kClassIris) {
        r0 = std::min(r0, y);
        r1 = std::max(r1, y);
        c0 = std::min(c0, x);
        c1 = std::max(c1, x);
      }
  require(r1 >= 0, "iris region is empty in record " + original.record_id);
  const CropBox expected{r0, c0, r1 - r0 + 1, c1 - c0 + 1};
  require(expected == stylized.bbox,
          "crop bbox does not match the iris bounding box of the target image");

  EyeImage out = original;
  for (Eigen::Index y = 0; y < stylized.bbox.height; ++y)
    for (Eigen::Index x = 0; x < stylized.bbox.width; ++x) {
      if (mask.labels(r0 + y, c0 + x) != kClassIris) continue;
      const long v = std::lround(static_cast<double>(stylized.pixels(y, x)) * 255.0);
      out.pixels(r0 + y, c0 + x) = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
  for (std::size_t i = 0; i < stylized.glints.size(); ++i) {
    const auto& [gy, gx] = stylized.glints.coordinates[i];
    out.pixels(r0 + gy, c0 + gx) = stylized.glints.original_values[i];
  }
  return out;
}

}  // namespace iristyle

#endif  // IRISTYLE_IMAGING_IRIS_HPP_

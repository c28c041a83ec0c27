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

#ifndef IRISTYLE_GAZE_LANDMARKS_HPP_
#define IRISTYLE_GAZE_LANDMARKS_HPP_

#include <vector>

#include "iristyle/common.hpp"
#include "iristyle/image.hpp"

namespace iristyle {

inline constexpr int kNumLandmarks = 19;

/// The fixed 19-entry eye landmark vector, in pixel units:
///   0..5   pupil ellipse: center x, center y, a, b, theta, area ratio
///   6..11  iris disc ellipse (iris+pupil): center x, center y, a, b, theta,
///          area ratio
///   12..13 pupil center minus iris center: dx, dy
///   14..17 eye-corner proxies: leftmost opening pixel x, y; rightmost x, y
///   18     sclera area ratio
/// Ellipses are fit to region boundary pixels; area ratios are pixel counts
/// over the image area. Fails when the pupil or iris class is missing.
VectorX<double> extract_landmarks(const SegMask& mask);

/// Boundary pixels (centers, (x, y)) of the region where `predicate` holds:
/// region pixels with a 4-neighbor outside the region or on the image edge.
std::vector<Eigen::Vector2d> region_boundary(const SegMask& mask,
                                             std::uint8_t min_class);

}  // namespace iristyle

#endif  // IRISTYLE_GAZE_LANDMARKS_HPP_

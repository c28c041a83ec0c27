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

#ifndef IRISTYLE_GAZE_ELLIPSE_HPP_
#define IRISTYLE_GAZE_ELLIPSE_HPP_

#include <vector>

#include <Eigen/Core>

#include "iristyle/common.hpp"

namespace iristyle {

/// Ellipse with semi-axes a >= b > 0 and major-axis angle theta in [0, pi).
struct Ellipse {
  double cx = 0, cy = 0;
  double a = 0, b = 0;
  double theta = 0;
  double residual = 0;  // rms algebraic distance of the fit
};

/// Direct least-squares conic fit with the ellipse constraint (the
/// numerically stable split-design formulation), parameters recovered from
/// the conic coefficients. Needs >= 5 points in a non-degenerate
/// configuration.
Ellipse fit_ellipse(const std::vector<Eigen::Vector2d>& points);

/// Angle between two gaze directions in degrees:
/// arccos(clamp(<u/|u|, v/|v|>, -1, 1)). Rejects zero vectors.
double angular_error_degrees(const Eigen::Vector3d& predicted,
                             const Eigen::Vector3d& truth);

}  // namespace iristyle

#endif  // IRISTYLE_GAZE_ELLIPSE_HPP_

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

#include "iristyle/gaze/ellipse.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace iristyle {

Ellipse fit_ellipse(const std::vector<Eigen::Vector2d>& points) {
  require(points.size() >= 5, "ellipse fit needs at least 5 points, got " +
                                  std::to_string(points.size()));
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());

  // Center the data for conditioning; the center shift is undone at the end.
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(n);

  Eigen::MatrixXd d1(n, 3), d2(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = points[static_cast<std::size_t>(i)].x() - mean.x();
    const double y = points[static_cast<std::size_t>(i)].y() - mean.y();
    d1.row(i) << x * x, x * y, y * y;
    d2.row(i) << x, y, 1.0;
  }
  const Eigen::Matrix3d s1 = d1.transpose() * d1;
  const Eigen::Matrix3d s2 = d1.transpose() * d2;
  const Eigen::Matrix3d s3 = d2.transpose() * d2;

  const Eigen::FullPivLU<Eigen::Matrix3d> s3_lu(s3);
  require(s3_lu.isInvertible(), "degenerate point configuration for the ellipse fit");
  const Eigen::Matrix3d t = -s3_lu.solve(s2.transpose());
  const Eigen::Matrix3d m_full = s1 + s2 * t;
  Eigen::Matrix3d m;  // premultiplied by the inverse constraint matrix
  m.row(0) = m_full.row(2) / 2.0;
  m.row(1) = -m_full.row(1);
  m.row(2) = m_full.row(0) / 2.0;

  const Eigen::EigenSolver<Eigen::Matrix3d> eig(m);
  Eigen::Vector3d quad = Eigen::Vector3d::Zero();
  bool found = false;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(eig.eigenvalues()(i).imag()) > 1e-9) continue;
    const Eigen::Vector3d v = eig.eigenvectors().col(i).real();
    const double constraint = 4.0 * v(0) * v(2) - v(1) * v(1);
    if (constraint > 0) {
      quad = v;
      found = true;
      break;
    }
  }
  require(found, "point configuration does not define an ellipse");
  const Eigen::Vector3d lin = t * quad;

  // conic in centered coordinates
  const double A = quad(0), B = quad(1), C = quad(2);
  const double D = lin(0), E = lin(1), F = lin(2);

  const double denom = B * B - 4.0 * A * C;  // < 0 for an ellipse
  const double cx = (2.0 * C * D - B * E) / denom;
  const double cy = (2.0 * A * E - B * D) / denom;
  double f_center = A * cx * cx + B * cx * cy + C * cy * cy + D * cx + E * cy + F;

  Eigen::Matrix2d q;
  q << A, B / 2.0, B / 2.0, C;
  if (q.trace() < 0) {
    q = -q;
    f_center = -f_center;
  }
  require(f_center < 0, "point configuration does not define an ellipse");

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qe(q);
  const double l1 = qe.eigenvalues()(0), l2 = qe.eigenvalues()(1);  // l1 <= l2
  require(l1 > 0, "point configuration does not define an ellipse");

  Ellipse out;
  out.cx = cx + mean.x();
  out.cy = cy + mean.y();
  out.a = std::sqrt(-f_center / l1);
  out.b = std::sqrt(-f_center / l2);
  const Eigen::Vector2d major = qe.eigenvectors().col(0);
  out.theta = std::atan2(major.y(), major.x());
  if (out.theta < 0) out.theta += M_PI;
  if (out.theta >= M_PI) out.theta -= M_PI;

  const double scale = std::sqrt(quad.squaredNorm() + lin.squaredNorm());
  double rss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = d1.row(i).dot(quad) + d2.row(i).dot(lin);
    rss += r * r;
  }
  out.residual = std::sqrt(rss / static_cast<double>(n)) / scale;
  return out;
}

double angular_error_degrees(const Eigen::Vector3d& predicted,
                             const Eigen::Vector3d& truth) {
  const double np = predicted.norm(), nt = truth.norm();
  require(np > 1e-12 && nt > 1e-12, "angular error is undefined for zero vectors");
  const double dot = std::clamp(predicted.dot(truth) / (np * nt), -1.0, 1.0);
  return std::acos(dot) * 180.0 / M_PI;
}

}  // namespace iristyle

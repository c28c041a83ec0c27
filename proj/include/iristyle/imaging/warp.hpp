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

#ifndef IRISTYLE_IMAGING_WARP_HPP_
#define IRISTYLE_IMAGING_WARP_HPP_

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "iristyle/imaging/iris.hpp"
#include "iristyle/rng.hpp"

namespace iristyle {

/// Bilinear sample with zero padding: taps outside the raster contribute 0.
template <typename Scalar>
Scalar sample_bilinear_zero(const MatrixX<Scalar>& img, double x, double y) {
  const Eigen::Index h = img.rows(), w = img.cols();
  const double xf = std::floor(x), yf = std::floor(y);
  const Eigen::Index x0 = static_cast<Eigen::Index>(xf), y0 = static_cast<Eigen::Index>(yf);
  const double fx = x - xf, fy = y - yf;
  double acc = 0.0;
  auto tap = [&](Eigen::Index yy, Eigen::Index xx, double wgt) {
    if (yy >= 0 && yy < h && xx >= 0 && xx < w)
      acc += wgt * static_cast<double>(img(yy, xx));
  };
  tap(y0, x0, (1 - fx) * (1 - fy));
  tap(y0, x0 + 1, fx * (1 - fy));
  tap(y0 + 1, x0, (1 - fx) * fy);
  tap(y0 + 1, x0 + 1, fx * fy);
  return static_cast<Scalar>(acc);
}

inline std::uint8_t sample_nearest_zero(const ImageU8& img, double x, double y) {
  const Eigen::Index xr = static_cast<Eigen::Index>(std::floor(x + 0.5));
  const Eigen::Index yr = static_cast<Eigen::Index>(std::floor(y + 0.5));
  if (yr < 0 || yr >= img.rows() || xr < 0 || xr >= img.cols()) return 0;
  return img(yr, xr);
}

/// Homography taking the four `from` corners onto the four `to` corners,
/// found by solving the standard 8-unknown linear system (h33 = 1).
/// Points are (x, y).
inline Eigen::Matrix3d homography_from_corners(
    const std::array<Eigen::Vector2d, 4>& from,
    const std::array<Eigen::Vector2d, 4>& to) {
  Eigen::Matrix<double, 8, 8> A;
  Eigen::Matrix<double, 8, 1> rhs;
  for (int i = 0; i < 4; ++i) {
    const double x = from[i].x(), y = from[i].y();
    const double u = to[i].x(), v = to[i].y();
    A.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    A.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    rhs(2 * i) = u;
    rhs(2 * i + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> hv = A.colPivHouseholderQr().solve(rhs);
  Eigen::Matrix3d H;
  H << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), 1.0;
  return H;
}

namespace detail {

/// Resample a crop through the inverse pixel map (output -> source coords).
template <typename Scalar, typename MapFn>
IrisCrop<Scalar> resample_crop(const IrisCrop<Scalar>& crop, MapFn&& source_of) {
  IrisCrop<Scalar> out;
  out.bbox = crop.bbox;
  const Eigen::Index h = crop.height(), w = crop.width();
  out.pixels.setZero(h, w);
  out.validity.setZero(h, w);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x) {
      const auto [sx, sy] = source_of(static_cast<double>(x), static_cast<double>(y));
      out.pixels(y, x) = sample_bilinear_zero(crop.pixels, sx, sy);
      out.validity(y, x) = sample_nearest_zero(crop.validity, sx, sy);
    }
  // Glint bookkeeping does not survive a synthetic view; the resampled crop
  // is only used for feature extraction, never reinserted.
  out.glints = GlintMap{};
  return out;
}

}  // namespace detail

/// Rotate the crop by an angle drawn from Uniform(-max_degrees, +max_degrees)
/// about the crop center. Pixels are interpolated bilinearly with zero fill,
/// the validity mask with nearest neighbor; dimensions are unchanged.
template <typename Scalar>
IrisCrop<Scalar> random_rotation(const IrisCrop<Scalar>& crop, double max_degrees,
                                 Rng& rng) {
  require(max_degrees >= 0, "rotation degree must be >= 0");
  const double theta = rng.uniform(-max_degrees, max_degrees) * M_PI / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double cx = static_cast<double>(crop.width() - 1) / 2.0;
  const double cy = static_cast<double>(crop.height() - 1) / 2.0;
  return detail::resample_crop(crop, [&](double x, double y) {
    const double dx = x - cx, dy = y - cy;
    // inverse rotation of the output grid
    return std::pair<double, double>{c * dx + s * dy + cx, -s * dx + c * dy + cy};
  });
}

/// Image corners in (x, y), ordered top-left, top-right, bottom-right,
/// bottom-left.
inline std::array<Eigen::Vector2d, 4> image_corners(Eigen::Index height,
                                                    Eigen::Index width) {
  const double w = static_cast<double>(width), h = static_cast<double>(height);
  return {Eigen::Vector2d(0, 0), Eigen::Vector2d(w - 1, 0), Eigen::Vector2d(w - 1, h - 1),
          Eigen::Vector2d(0, h - 1)};
}

/// Inward-displaced corners for a perspective shift of strength `degree`:
/// each corner moves by (dx, dy) with dx ~ Uniform(0, degree*w/2) and
/// dy ~ Uniform(0, degree*h/2), drawn in corner order (x before y).
inline std::array<Eigen::Vector2d, 4> perspective_corners(Eigen::Index height,
                                                          Eigen::Index width,
                                                          double degree, Rng& rng) {
  require(degree >= 0 && degree <= 1, "perspective degree must be in [0,1]");
  const double mx = degree * static_cast<double>(width) / 2.0;
  const double my = degree * static_cast<double>(height) / 2.0;
  const std::array<Eigen::Vector2d, 4> inward = {
      Eigen::Vector2d(1, 1), Eigen::Vector2d(-1, 1), Eigen::Vector2d(-1, -1),
      Eigen::Vector2d(1, -1)};
  std::array<Eigen::Vector2d, 4> displaced = image_corners(height, width);
  for (int i = 0; i < 4; ++i) {
    const double dx = rng.uniform(0.0, mx);
    const double dy = rng.uniform(0.0, my);
    displaced[i] += Eigen::Vector2d(inward[i].x() * dx, inward[i].y() * dy);
  }
  return displaced;
}

/// Random perspective shift of strength `degree` in [0,1]: warp the crop so
/// its corners land on the perspective_corners draw.
template <typename Scalar>
IrisCrop<Scalar> random_perspective(const IrisCrop<Scalar>& crop, double degree,
                                    Rng& rng) {
  const std::array<Eigen::Vector2d, 4> corners = image_corners(crop.height(), crop.width());
  const std::array<Eigen::Vector2d, 4> displaced =
      perspective_corners(crop.height(), crop.width(), degree, rng);
  const Eigen::Matrix3d H = homography_from_corners(corners, displaced);
  const Eigen::Matrix3d Hinv = H.inverse();
  return detail::resample_crop(crop, [&](double x, double y) {
    const Eigen::Vector3d p = Hinv * Eigen::Vector3d(x, y, 1.0);
    return std::pair<double, double>{p.x() / p.z(), p.y() / p.z()};
  });
}

}  // namespace iristyle

#endif  // IRISTYLE_IMAGING_WARP_HPP_

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

#include "iristyle/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "iristyle/io/png.hpp"
#include "iristyle/rng.hpp"

namespace fs = std::filesystem;

namespace iristyle {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Wave {
  bool angular;
  double freq;
  double phase;
  double amplitude;
};

struct UserSignature {
  std::vector<Wave> waves;
  Eigen::Matrix<double, 10, 10> noise_grid;
  double tone;
  double contrast;
  double glint_angle[2];
  double glint_radius[2];  // fraction of the iris radius
};

UserSignature make_signature(Rng rng) {
  UserSignature sig;
  const int n_waves = 3 + static_cast<int>(rng.uniform_index(4));
  for (int k = 0; k < n_waves; ++k) {
    Wave wave;
    wave.angular = rng.uniform_index(2) == 0;
    wave.freq = wave.angular ? static_cast<double>(2 + rng.uniform_index(16))
                             : rng.uniform(2.0, 9.0);
    wave.phase = rng.uniform(0.0, kTwoPi);
    wave.amplitude = rng.uniform(0.5, 1.0);
    sig.waves.push_back(wave);
  }
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) sig.noise_grid(i, j) = rng.uniform(-1.0, 1.0);
  sig.tone = rng.uniform(-25.0, 25.0);
  sig.contrast = rng.uniform(0.75, 1.1);
  for (int g = 0; g < 2; ++g) {
    sig.glint_angle[g] = rng.uniform(0.0, kTwoPi);
    sig.glint_radius[g] = rng.uniform(0.50, 0.78);
  }
  return sig;
}

double sample_noise_grid(const Eigen::Matrix<double, 10, 10>& grid, double u, double v) {
  // u, v in [-1, 1] over the iris bounding square
  const double x = (u + 1.0) / 2.0 * 9.0, y = (v + 1.0) / 2.0 * 9.0;
  const int x0 = std::min(8, std::max(0, static_cast<int>(std::floor(x))));
  const int y0 = std::min(8, std::max(0, static_cast<int>(std::floor(y))));
  const double fx = std::min(1.0, std::max(0.0, x - x0));
  const double fy = std::min(1.0, std::max(0.0, y - y0));
  return grid(y0, x0) * (1 - fx) * (1 - fy) + grid(y0, x0 + 1) * fx * (1 - fy) +
         grid(y0 + 1, x0) * (1 - fx) * fy + grid(y0 + 1, x0 + 1) * fx * fy;
}

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::lround(std::min(255.0, std::max(0.0, v))));
}

std::string stem_of(int user, int sample) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "u%03d_s%03d", user, sample);
  return buf;
}

}  // namespace

SyntheticSample render_synthetic_eye(int user, int sample, const SyntheticConfig& config) {
  require(config.n_users >= 2, "synthetic corpus needs at least 2 users");
  require(config.samples_per_user >= 2, "synthetic corpus needs at least 2 samples per user");
  require(config.height >= 32 && config.width >= 32, "synthetic images must be at least 32x32");
  require(user >= 0 && user < config.n_users && sample >= 0 &&
              sample < config.samples_per_user,
          "sample index out of range");

  const Rng root(config.seed);
  const UserSignature sig =
      make_signature(root.fork("user").fork(static_cast<std::uint64_t>(user)));
  Rng sample_rng = root.fork("sample")
                       .fork(static_cast<std::uint64_t>(user))
                       .fork(static_cast<std::uint64_t>(sample));

  const int h = config.height, w = config.width;
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  const double opening_a = 0.42 * w, opening_b = 0.34 * h;
  const double iris_r = 0.30 * std::min(h, w);

  // per-sample draws, in a fixed order
  const double gaze_phi = sample_rng.uniform(0.0, kTwoPi);
  const double gaze_rho = std::sqrt(sample_rng.uniform()) * 0.38;
  const double dilation = sample_rng.uniform(0.85, 1.15);
  const double brightness = sample_rng.uniform(0.9, 1.1);

  const double gx = gaze_rho * std::cos(gaze_phi), gy = gaze_rho * std::sin(gaze_phi);
  const Eigen::Vector3d gaze(gx, gy, std::sqrt(std::max(0.0, 1.0 - gx * gx - gy * gy)));
  const double shift = 0.08 * std::min(h, w);
  const double icx = cx + gx * shift, icy = cy + gy * shift;
  const double pupil_r = iris_r * 0.36 * dilation;

  SyntheticSample out;
  out.image.pixels.resize(h, w);
  char user_buf[16];
  std::snprintf(user_buf, sizeof(user_buf), "u%03d", user);
  out.image.user_id = user_buf;
  out.image.record_id = stem_of(user, sample);
  out.mask.labels.setZero(h, w);
  out.gaze = GazeLabel{gaze};

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double sensor = sample_rng.uniform(-1.0, 1.0);  // one draw per pixel
      const double ox = (x - cx) / opening_a, oy = (y - cy) / opening_b;
      if (ox * ox + oy * oy > 1.0) {
        out.image.pixels(y, x) = clamp_u8(150.0 + 5.0 * sensor);
        continue;
      }
      const double dx = x - icx, dy = y - icy;
      const double r = std::sqrt(dx * dx + dy * dy);
      if (r <= pupil_r) {
        out.mask.labels(y, x) = kClassPupil;
        out.image.pixels(y, x) = clamp_u8(26.0 + 3.0 * sensor);
      } else if (r <= iris_r) {
        out.mask.labels(y, x) = kClassIris;
        const double rn = (r - pupil_r) / std::max(1e-9, iris_r - pupil_r);
        const double theta = std::atan2(dy, dx);
        double t = 0.0;
        for (const auto& wave : sig.waves)
          t += wave.amplitude * std::sin(wave.freq * (wave.angular ? theta : kTwoPi * rn) +
                                         wave.phase);
        t /= static_cast<double>(sig.waves.size());
        const double noise = sample_noise_grid(sig.noise_grid, dx / iris_r, dy / iris_r);
        double val = 128.0 + sig.tone + sig.contrast * (46.0 * t + 22.0 * noise) + 2.0 * sensor;
        val = std::min(195.0, std::max(45.0, val)) * brightness;
        out.image.pixels(y, x) = clamp_u8(std::min(225.0, val));
      } else {
        out.mask.labels(y, x) = kClassSclera;
        out.image.pixels(y, x) = clamp_u8(228.0 + 4.0 * sensor);
      }
    }

  // fixed glints: user-seeded polar position relative to the iris center
  const double glint_r = std::max(1.5, 0.05 * iris_r);
  const std::uint8_t glint_values[2] = {255, 252};
  for (int g = 0; g < 2; ++g) {
    const double gcx = icx + sig.glint_radius[g] * iris_r * std::cos(sig.glint_angle[g]);
    const double gcy = icy + sig.glint_radius[g] * iris_r * std::sin(sig.glint_angle[g]);
    for (int y = static_cast<int>(gcy - glint_r) - 1; y <= gcy + glint_r + 1; ++y)
      for (int x = static_cast<int>(gcx - glint_r) - 1; x <= gcx + glint_r + 1; ++x) {
        if (y < 0 || y >= h || x < 0 || x >= w) continue;
        if (out.mask.labels(y, x) != kClassIris) continue;
        const double d2 = (x - gcx) * (x - gcx) + (y - gcy) * (y - gcy);
        if (d2 <= glint_r * glint_r) out.image.pixels(y, x) = glint_values[g];
      }
  }
  return out;
}

DatasetManifest generate_synthetic_corpus(const SyntheticConfig& config,
                                          const fs::path& root) {
  require(config.n_users >= 2, "synthetic corpus needs at least 2 users");
  require(config.samples_per_user >= 2, "synthetic corpus needs at least 2 samples per user");

  fs::create_directories(root / "images");
  fs::create_directories(root / "labels");
  std::ofstream meta(root / "meta.csv", std::ios::trunc);
  std::ofstream gaze(root / "gaze.csv", std::ios::trunc);
  require(meta.good() && gaze.good(), "cannot write corpus metadata under " + root.string());
  meta << "stem,user_id\n";
  gaze << "stem,x,y,z\n";

  DatasetManifest manifest;
  for (int user = 0; user < config.n_users; ++user) {
    char user_buf[16];
    std::snprintf(user_buf, sizeof(user_buf), "u%03d", user);
    manifest.class_users.push_back(user_buf);
    for (int sample = 0; sample < config.samples_per_user; ++sample) {
      const SyntheticSample rendered = render_synthetic_eye(user, sample, config);
      const std::string stem = rendered.image.record_id;
      const fs::path image_path = root / "images" / (stem + ".png");
      const fs::path mask_path = root / "labels" / (stem + ".png");
      write_png_gray(image_path.string(), rendered.image.pixels);
      write_png_gray(mask_path.string(), rendered.mask.labels);
      meta << stem << "," << rendered.image.user_id << "\n";
      char line[128];
      std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g\n", stem.c_str(),
                    rendered.gaze.vector.x(), rendered.gaze.vector.y(),
                    rendered.gaze.vector.z());
      gaze << line;

      DataRecord rec;
      rec.record_id = stem;
      rec.image_path = image_path;
      rec.mask_path = mask_path;
      rec.gaze = rendered.gaze;
      rec.user_id = rendered.image.user_id;
      rec.split = Split::kTrain;
      rec.class_index = user;
      manifest.records.push_back(std::move(rec));
    }
  }
  return manifest;
}

}  // namespace iristyle

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

#ifndef IRISTYLE_DATA_SYNTHETIC_HPP_
#define IRISTYLE_DATA_SYNTHETIC_HPP_

#include <filesystem>

#include "iristyle/data/manifest.hpp"
#include "iristyle/image.hpp"

namespace iristyle {

/// Parameters of the procedural desk-scale corpus. Every user owns a
/// persistent iris signature (3-6 radial/angular sinusoids plus a seeded
/// noise field, tone, and contrast); samples within a user vary by pupil
/// dilation (+-15%), brightness (+-10%), gaze direction, and sensor noise.
struct SyntheticConfig {
  int n_users = 10;
  int samples_per_user = 10;
  int height = 200;
  int width = 320;
  std::uint64_t seed = 42;
};

struct SyntheticSample {
  EyeImage image;
  SegMask mask;
  GazeLabel gaze;
};

/// Render one eye deterministically from (config.seed, user, sample). The
/// mask is exact; two fixed glint discs (user-seeded polar position relative
/// to the iris center, intensities 255 and 252) sit fully on iris pixels.
SyntheticSample render_synthetic_eye(int user, int sample, const SyntheticConfig& config);

/// Write the corpus in the recognition layout (images/, labels/, meta.csv,
/// gaze.csv) and return the manifest of all records (unsplit; use
/// load_recognition_dataset for a train/test split).
DatasetManifest generate_synthetic_corpus(const SyntheticConfig& config,
                                          const std::filesystem::path& root);

}  // namespace iristyle

#endif  // IRISTYLE_DATA_SYNTHETIC_HPP_

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

#ifndef IRISTYLE_DATA_MANIFEST_HPP_
#define IRISTYLE_DATA_MANIFEST_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "iristyle/image.hpp"

namespace iristyle {

enum class Split { kTrain, kValidation, kTest };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    default: return "test";
  }
}

/// Unit-norm 3D gaze direction (normalized on load, tolerance 1e-4).
struct GazeLabel {
  Eigen::Vector3d vector;
};

struct DataRecord {
  std::string record_id;
  std::filesystem::path image_path;
  std::filesystem::path mask_path;  // empty when the dataset has no masks
  std::optional<GazeLabel> gaze;
  std::string user_id;
  Split split = Split::kTrain;
  int class_index = -1;  // 0..K-1 for recognition manifests
};

/// A fully resolved dataset: every referenced file existed at load time,
/// every user has at least two records, and splits are disjoint by
/// construction (each record belongs to exactly one).
struct DatasetManifest {
  std::vector<DataRecord> records;
  std::vector<std::string> class_users;  // class index -> user_id

  int num_classes() const { return static_cast<int>(class_users.size()); }

  std::vector<const DataRecord*> split_records(Split split) const {
    std::vector<const DataRecord*> out;
    for (const auto& r : records)
      if (r.split == split) out.push_back(&r);
    return out;
  }
};

/// Load an eye image (8-bit grayscale PNG) for a record.
EyeImage load_eye_image(const DataRecord& record);

/// Load the per-pixel class map (PNG or .npy) for a record.
SegMask load_seg_mask(const DataRecord& record);

/// Recognition layout: root/images/*.png, root/labels/<stem>.{png,npy},
/// optional root/meta.csv (stem,user_id; default user is the stem up to the
/// first '_'), optional root/gaze.csv (stem,x,y,z). Users with fewer than two
/// samples are dropped; remaining users become classes 0..K-1 in lexicographic
/// user_id order; each user's records are split sample-wise with
/// round-half-up test share (at least one record on each side).
DatasetManifest load_recognition_dataset(const std::filesystem::path& root,
                                         double test_fraction, std::uint64_t seed);

/// Gaze layout: <root or root/split>/sequences/<seq>/*.png with
/// labels/<seq>.txt holding one "frame_id x y z" line per frame. When the
/// root holds train/validation/test directories the original partition is
/// preserved; otherwise everything loads as train.
DatasetManifest load_gaze_dataset(const std::filesystem::path& root);

}  // namespace iristyle

#endif  // IRISTYLE_DATA_MANIFEST_HPP_

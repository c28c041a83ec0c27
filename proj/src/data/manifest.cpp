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

#include "iristyle/data/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "iristyle/io/npy.hpp"
#include "iristyle/io/png.hpp"
#include "iristyle/rng.hpp"

namespace fs = std::filesystem;

namespace iristyle {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    while (!item.empty() && (item.back() == '\r' || item.back() == ' ')) item.pop_back();
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    fields.push_back(item);
  }
  return fields;
}

GazeLabel normalize_gaze(Eigen::Vector3d v, const std::string& where) {
  const double norm = v.norm();
  require(norm > 1e-12, "zero gaze vector at " + where);
  v /= norm;
  require(std::abs(v.norm() - 1.0) <= 1e-4, "gaze normalization failed at " + where);
  return GazeLabel{v};
}

std::vector<std::string> sorted_png_stems(const fs::path& dir) {
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      stems.push_back(entry.path().stem().string());
  std::sort(stems.begin(), stems.end());
  return stems;
}

}  // namespace

EyeImage load_eye_image(const DataRecord& record) {
  EyeImage image;
  image.pixels = read_png_gray(record.image_path.string());
  image.user_id = record.user_id;
  image.record_id = record.record_id;
  return image;
}

SegMask load_seg_mask(const DataRecord& record) {
  require(!record.mask_path.empty(),
          "record " + record.record_id + " has no segmentation mask");
  SegMask mask;
  if (record.mask_path.extension() == ".npy")
    mask.labels = read_npy_u8(record.mask_path.string());
  else
    mask.labels = read_png_gray(record.mask_path.string());
  require((mask.labels.array() <= kClassPupil).all(),
          "mask holds out-of-range classes: " + record.mask_path.string());
  return mask;
}

DatasetManifest load_recognition_dataset(const fs::path& root, double test_fraction,
                                         std::uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, "test fraction must be in (0,1)");
  const fs::path images = root / "images";
  const fs::path labels = root / "labels";
  require(fs::is_directory(images), "missing images directory under " + root.string());
  require(fs::is_directory(labels), "missing labels directory under " + root.string());

  // optional stem -> user map
  std::map<std::string, std::string> user_of;
  if (fs::exists(root / "meta.csv")) {
    std::ifstream meta(root / "meta.csv");
    std::string line;
    while (std::getline(meta, line)) {
      if (line.empty() || line == "stem,user_id") continue;
      const auto fields = split_csv_line(line);
      require(fields.size() == 2, "malformed meta.csv line: " + line);
      user_of[fields[0]] = fields[1];
    }
  }
  // optional stem -> gaze map
  std::map<std::string, GazeLabel> gaze_of;
  if (fs::exists(root / "gaze.csv")) {
    std::ifstream gaze(root / "gaze.csv");
    std::string line;
    while (std::getline(gaze, line)) {
      if (line.empty() || line.rfind("stem,", 0) == 0) continue;
      const auto fields = split_csv_line(line);
      require(fields.size() == 4, "malformed gaze.csv line: " + line);
      gaze_of.emplace(fields[0],
                      normalize_gaze({std::stod(fields[1]), std::stod(fields[2]),
                                      std::stod(fields[3])},
                                     fields[0]));
    }
  }

  std::map<std::string, std::vector<DataRecord>> by_user;
  for (const auto& stem : sorted_png_stems(images)) {
    DataRecord rec;
    rec.record_id = stem;
    rec.image_path = images / (stem + ".png");
    if (fs::exists(labels / (stem + ".png")))
      rec.mask_path = labels / (stem + ".png");
    else if (fs::exists(labels / (stem + ".npy")))
      rec.mask_path = labels / (stem + ".npy");
    else
      fail("missing segmentation mask for record " + stem);
    const auto it = user_of.find(stem);
    rec.user_id = it != user_of.end() ? it->second : stem.substr(0, stem.find('_'));
    const auto git = gaze_of.find(stem);
    if (git != gaze_of.end()) rec.gaze = git->second;
    by_user[rec.user_id].push_back(std::move(rec));
  }

  // users with fewer than two samples cannot appear on both split sides
  for (auto it = by_user.begin(); it != by_user.end();)
    it = it->second.size() < 2 ? by_user.erase(it) : std::next(it);
  require(by_user.size() >= 2,
          "classification needs at least two users with two samples each, found " +
              std::to_string(by_user.size()));

  DatasetManifest manifest;
  const Rng split_root = Rng(seed).fork("split");
  int class_index = 0;
  for (auto& [user, recs] : by_user) {  // std::map iterates lexicographically
    manifest.class_users.push_back(user);
    std::sort(recs.begin(), recs.end(),
              [](const DataRecord& a, const DataRecord& b) { return a.record_id < b.record_id; });
    std::vector<std::size_t> order(recs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng = split_root.fork(user);
    rng.shuffle(order);

    // round-half-up share, with both sides kept nonempty
    const auto n = static_cast<double>(recs.size());
    std::size_t test_count = static_cast<std::size_t>(std::floor(test_fraction * n + 0.5));
    test_count = std::clamp<std::size_t>(test_count, 1, recs.size() - 1);
    for (std::size_t i = 0; i < order.size(); ++i) {
      DataRecord rec = std::move(recs[order[i]]);
      rec.split = i < test_count ? Split::kTest : Split::kTrain;
      rec.class_index = class_index;
      manifest.records.push_back(std::move(rec));
    }
    ++class_index;
  }
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const DataRecord& a, const DataRecord& b) { return a.record_id < b.record_id; });
  return manifest;
}

DatasetManifest load_gaze_dataset(const fs::path& root) {
  require(fs::is_directory(root), "no such dataset directory: " + root.string());

  std::vector<std::pair<fs::path, Split>> parts;
  if (fs::is_directory(root / "sequences")) {
    parts.emplace_back(root, Split::kTrain);
  } else {
    if (fs::is_directory(root / "train")) parts.emplace_back(root / "train", Split::kTrain);
    if (fs::is_directory(root / "validation"))
      parts.emplace_back(root / "validation", Split::kValidation);
    if (fs::is_directory(root / "test")) parts.emplace_back(root / "test", Split::kTest);
  }
  require(!parts.empty(), "no sequences found under " + root.string());

  DatasetManifest manifest;
  for (const auto& [part, split] : parts) {
    const fs::path sequences = part / "sequences";
    require(fs::is_directory(sequences), "missing sequences directory under " + part.string());
    std::vector<std::string> seq_ids;
    for (const auto& entry : fs::directory_iterator(sequences))
      if (entry.is_directory()) seq_ids.push_back(entry.path().filename().string());
    std::sort(seq_ids.begin(), seq_ids.end());
    require(!seq_ids.empty(), "no sequences under " + sequences.string());

    for (const auto& seq : seq_ids) {
      std::map<std::string, GazeLabel> gaze_of;
      const fs::path label_file = part / "labels" / (seq + ".txt");
      if (fs::exists(label_file)) {
        std::ifstream in(label_file);
        std::string frame;
        double x, y, z;
        while (in >> frame >> x >> y >> z)
          gaze_of.emplace(frame, normalize_gaze({x, y, z}, seq + "/" + frame));
      }
      for (const auto& stem : sorted_png_stems(sequences / seq)) {
        DataRecord rec;
        rec.record_id = seq + "/" + stem;
        rec.image_path = sequences / seq / (stem + ".png");
        rec.user_id = seq;
        rec.split = split;
        const auto it = gaze_of.find(stem);
        require(it != gaze_of.end(),
                "frame " + rec.record_id + " has no gaze vector in " + label_file.string());
        rec.gaze = it->second;
        manifest.records.push_back(std::move(rec));
      }
    }
  }
  return manifest;
}

}  // namespace iristyle

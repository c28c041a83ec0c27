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

#ifndef IRISTYLE_DATA_CACHE_HPP_
#define IRISTYLE_DATA_CACHE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "iristyle/common.hpp"

namespace iristyle {

/// Feature kinds registered by default.
inline constexpr const char* kStyleFeatureKind = "style-default";  // 1,920
inline constexpr const char* kCnnFeatureKind = "cnn-224";          // 25,088

/// Keyed store of feature vectors: (record_id, feature_kind,
/// variation_descriptor) -> float32 vector. Vector lengths are checked
/// against the kind's registered dimensionality on put. Single writer,
/// any number of readers; concurrent writers must be serialized by the
/// caller.
///
/// On disk: one file per feature kind ("<kind>.islc"), magic "ISLC",
/// u16 schema version, an index of (record_id, variation, offset, length)
/// entries, then the little-endian float32 payload. Entries are written in
/// sorted key order, so saving the same content twice is byte-identical.
class FeatureCache {
 public:
  static constexpr std::uint16_t kSchemaVersion = 1;

  FeatureCache();

  void register_kind(const std::string& kind, Eigen::Index dimension);
  Eigen::Index kind_dimension(const std::string& kind) const;

  void put(const std::string& record_id, const std::string& kind,
           const std::string& variation, const VectorX<float>& vector);

  /// Explicit not-found result for missing keys.
  std::optional<VectorX<float>> get(const std::string& record_id, const std::string& kind,
                                    const std::string& variation) const;

  std::size_t size(const std::string& kind) const;

  /// Write one file per kind into `dir` (created if needed).
  void save(const std::filesystem::path& dir) const;

  /// Load every "*.islc" file under `dir`. Kinds found on disk are
  /// registered with the stored dimensionality if not already known.
  static FeatureCache load(const std::filesystem::path& dir);

 private:
  using Key = std::pair<std::string, std::string>;  // (record_id, variation)
  std::map<std::string, Eigen::Index> dimensions_;
  std::map<std::string, std::map<Key, VectorX<float>>> entries_;
};

}  // namespace iristyle

#endif  // IRISTYLE_DATA_CACHE_HPP_

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

#include "iristyle/data/cache.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

namespace fs = std::filesystem;

namespace iristyle {
namespace {

constexpr char kMagic[4] = {'I', 'S', 'L', 'C'};

void put_u32(std::ostream& f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  f.write(reinterpret_cast<char*>(b), 4);
}

void put_u64(std::ostream& f, std::uint64_t v) {
  put_u32(f, static_cast<std::uint32_t>(v));
  put_u32(f, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::istream& f, const std::string& path) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  require(f.good(), "cache file truncated: " + path);
  return b[0] | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& f, const std::string& path) {
  const std::uint64_t lo = get_u32(f, path);
  return lo | (static_cast<std::uint64_t>(get_u32(f, path)) << 32);
}

std::string get_string(std::istream& f, const std::string& path) {
  const std::uint32_t len = get_u32(f, path);
  require(len < (1u << 20), "cache file corrupt: " + path);
  std::string s(len, '\0');
  f.read(s.data(), len);
  require(f.good(), "cache file truncated: " + path);
  return s;
}

}  // namespace

FeatureCache::FeatureCache() {
  register_kind(kStyleFeatureKind, 1920);
  register_kind(kCnnFeatureKind, 25088);
}

void FeatureCache::register_kind(const std::string& kind, Eigen::Index dimension) {
  require(dimension > 0, "feature kind dimensionality must be positive");
  const auto it = dimensions_.find(kind);
  if (it != dimensions_.end()) {
    require(it->second == dimension, "feature kind " + kind +
                                         " already registered with dimensionality " +
                                         std::to_string(it->second));
    return;
  }
  dimensions_[kind] = dimension;
}

Eigen::Index FeatureCache::kind_dimension(const std::string& kind) const {
  const auto it = dimensions_.find(kind);
  require(it != dimensions_.end(), "unknown feature kind: " + kind);
  return it->second;
}

void FeatureCache::put(const std::string& record_id, const std::string& kind,
                       const std::string& variation, const VectorX<float>& vector) {
  const Eigen::Index dim = kind_dimension(kind);
  require(vector.size() == dim, "feature kind " + kind + " expects length " +
                                    std::to_string(dim) + ", got " +
                                    std::to_string(vector.size()));
  entries_[kind][{record_id, variation}] = vector;
}

std::optional<VectorX<float>> FeatureCache::get(const std::string& record_id,
                                                const std::string& kind,
                                                const std::string& variation) const {
  const auto kit = entries_.find(kind);
  if (kit == entries_.end()) return std::nullopt;
  const auto it = kit->second.find({record_id, variation});
  if (it == kit->second.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureCache::size(const std::string& kind) const {
  const auto kit = entries_.find(kind);
  return kit == entries_.end() ? 0 : kit->second.size();
}

void FeatureCache::save(const fs::path& dir) const {
  fs::create_directories(dir);
  for (const auto& [kind, table] : entries_) {
    const fs::path path = dir / (kind + ".islc");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(f.good(), "cannot write cache file: " + path.string());
    f.write(kMagic, 4);
    const std::uint16_t ver = kSchemaVersion;
    f.write(reinterpret_cast<const char*>(&ver), 2);
    put_u32(f, static_cast<std::uint32_t>(kind_dimension(kind)));
    put_u32(f, static_cast<std::uint32_t>(table.size()));
    std::uint64_t offset = 0;  // floats into the payload
    for (const auto& [key, vec] : table) {
      put_u32(f, static_cast<std::uint32_t>(key.first.size()));
      f.write(key.first.data(), static_cast<std::streamsize>(key.first.size()));
      put_u32(f, static_cast<std::uint32_t>(key.second.size()));
      f.write(key.second.data(), static_cast<std::streamsize>(key.second.size()));
      put_u64(f, offset);
      put_u32(f, static_cast<std::uint32_t>(vec.size()));
      offset += static_cast<std::uint64_t>(vec.size());
    }
    for (const auto& [key, vec] : table)
      f.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(float)));
    require(f.good(), "short write: " + path.string());
  }
}

FeatureCache FeatureCache::load(const fs::path& dir) {
  FeatureCache cache;
  require(fs::is_directory(dir), "no such cache directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".islc") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const auto& path : files) {
    const std::string kind = path.stem().string();
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "cannot open cache file: " + path.string());
    char magic[4];
    f.read(magic, 4);
    require(f.good() && std::memcmp(magic, kMagic, 4) == 0,
            "not a feature cache file: " + path.string());
    std::uint16_t ver = 0;
    f.read(reinterpret_cast<char*>(&ver), 2);
    require(f.good() && ver == kSchemaVersion,
            "unsupported cache version in " + path.string());
    const std::uint32_t dim = get_u32(f, path.string());
    const std::uint32_t count = get_u32(f, path.string());
    cache.register_kind(kind, static_cast<Eigen::Index>(dim));

    struct Entry {
      std::string record, variation;
      std::uint64_t offset;
      std::uint32_t length;
    };
    std::vector<Entry> index(count);
    for (auto& e : index) {
      e.record = get_string(f, path.string());
      e.variation = get_string(f, path.string());
      e.offset = get_u64(f, path.string());
      e.length = get_u32(f, path.string());
    }
    for (const auto& e : index) {
      require(e.length == dim, "cache entry length mismatch in " + path.string());
      VectorX<float> vec(e.length);
      f.read(reinterpret_cast<char*>(vec.data()),
             static_cast<std::streamsize>(e.length * sizeof(float)));
      require(f.good(), "cache file truncated: " + path.string());
      cache.entries_[kind][{e.record, e.variation}] = std::move(vec);
    }
  }
  return cache;
}

}  // namespace iristyle

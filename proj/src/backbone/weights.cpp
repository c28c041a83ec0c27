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

#include "iristyle/backbone/weights.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "iristyle/common.hpp"
#include "iristyle/rng.hpp"

namespace iristyle {
namespace {

constexpr char kMagic[4] = {'I', 'S', 'B', 'W'};
constexpr std::uint16_t kVersion = 1;

void put_u32(std::ofstream& f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  f.write(reinterpret_cast<char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& f, const std::string& path) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  require(f.good(), "weights file truncated: " + path);
  return b[0] | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::uint64_t payload_checksum(const std::vector<ConvWeights>& convs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& c : convs) {
    fnv1a(h, c.kernel.data(), c.kernel.size() * sizeof(float));
    fnv1a(h, c.bias.data(), c.bias.size() * sizeof(float));
  }
  return h;
}

}  // namespace

std::vector<LayerDef> vgg19_topology() {
  std::vector<LayerDef> defs;
  const int widths[5] = {64, 128, 256, 512, 512};
  const int convs_per_block[5] = {2, 2, 4, 4, 4};
  int in_c = 3;
  for (int block = 0; block < 5; ++block) {
    for (int i = 0; i < convs_per_block[block]; ++i) {
      const std::string suffix = std::to_string(block + 1) + "_" + std::to_string(i + 1);
      defs.push_back({LayerDef::kConv, "conv" + suffix, in_c, widths[block]});
      defs.push_back({LayerDef::kRelu, "relu" + suffix});
      in_c = widths[block];
    }
    defs.push_back({LayerDef::kPool, block == 4 ? "final_encoding" : "pool" + std::to_string(block + 1)});
  }
  return defs;
}

std::vector<LayerDef> small_gaze_topology() {
  std::vector<LayerDef> defs;
  const int widths[3] = {8, 16, 32};
  int in_c = 1;
  for (int block = 0; block < 3; ++block) {
    const std::string suffix = std::to_string(block + 1);
    defs.push_back({LayerDef::kConv, "gconv" + suffix, in_c, widths[block]});
    defs.push_back({LayerDef::kRelu, "grelu" + suffix});
    defs.push_back({LayerDef::kPool,
                    block == 2 ? "final_encoding" : "gpool" + suffix});
    in_c = widths[block];
  }
  return defs;
}

std::string WeightsFile::checksum() const { return hex64(payload_checksum(convs)); }

void WeightsFile::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "cannot write weights file: " + path);
  f.write(kMagic, 4);
  const std::uint16_t ver = kVersion;
  f.write(reinterpret_cast<const char*>(&ver), 2);
  put_u32(f, static_cast<std::uint32_t>(convs.size()));
  for (const auto& c : convs) {
    put_u32(f, static_cast<std::uint32_t>(c.name.size()));
    f.write(c.name.data(), static_cast<std::streamsize>(c.name.size()));
    put_u32(f, static_cast<std::uint32_t>(c.out_channels));
    put_u32(f, static_cast<std::uint32_t>(c.in_channels));
    put_u32(f, 3);
    put_u32(f, 3);
    f.write(reinterpret_cast<const char*>(c.kernel.data()),
            static_cast<std::streamsize>(c.kernel.size() * sizeof(float)));
    f.write(reinterpret_cast<const char*>(c.bias.data()),
            static_cast<std::streamsize>(c.bias.size() * sizeof(float)));
  }
  const std::uint64_t sum = payload_checksum(convs);
  f.write(reinterpret_cast<const char*>(&sum), 8);
  require(f.good(), "short write: " + path);
}

WeightsFile WeightsFile::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open weights file: " + path);
  char magic[4];
  f.read(magic, 4);
  require(f.good() && std::memcmp(magic, kMagic, 4) == 0,
          "not a backbone weights file: " + path);
  std::uint16_t ver = 0;
  f.read(reinterpret_cast<char*>(&ver), 2);
  require(f.good() && ver == kVersion, "unsupported weights version in " + path);

  WeightsFile out;
  const std::uint32_t n = get_u32(f, path);
  out.convs.resize(n);
  for (auto& c : out.convs) {
    const std::uint32_t name_len = get_u32(f, path);
    require(name_len < 256, "weights file corrupt: " + path);
    c.name.resize(name_len);
    f.read(c.name.data(), name_len);
    c.out_channels = static_cast<int>(get_u32(f, path));
    c.in_channels = static_cast<int>(get_u32(f, path));
    const std::uint32_t kh = get_u32(f, path), kw = get_u32(f, path);
    require(kh == 3 && kw == 3, "only 3x3 kernels are supported: " + path);
    require(c.out_channels > 0 && c.in_channels > 0 &&
                c.out_channels <= 4096 && c.in_channels <= 4096,
            "weights file corrupt: " + path);
    c.kernel.resize(static_cast<std::size_t>(c.out_channels) * c.in_channels * 9);
    c.bias.resize(static_cast<std::size_t>(c.out_channels));
    f.read(reinterpret_cast<char*>(c.kernel.data()),
           static_cast<std::streamsize>(c.kernel.size() * sizeof(float)));
    f.read(reinterpret_cast<char*>(c.bias.data()),
           static_cast<std::streamsize>(c.bias.size() * sizeof(float)));
    require(f.good(), "weights file truncated: " + path);
  }
  std::uint64_t stored = 0;
  f.read(reinterpret_cast<char*>(&stored), 8);
  require(f.good(), "weights file truncated: " + path);
  require(stored == payload_checksum(out.convs),
          "weights checksum mismatch in " + path);
  return out;
}

WeightsFile make_random_weights(const std::vector<LayerDef>& topology,
                                std::uint64_t seed) {
  WeightsFile out;
  Rng rng = Rng(seed).fork("backbone-weights");
  for (const auto& def : topology) {
    if (def.kind != LayerDef::kConv) continue;
    ConvWeights c;
    c.name = def.name;
    c.in_channels = def.in_channels;
    c.out_channels = def.out_channels;
    c.kernel.resize(static_cast<std::size_t>(c.out_channels) * c.in_channels * 9);
    c.bias.assign(static_cast<std::size_t>(c.out_channels), 0.0f);
    const double stddev = std::sqrt(2.0 / (9.0 * c.in_channels));
    Rng layer_rng = rng.fork(def.name);
    for (auto& w : c.kernel) w = static_cast<float>(stddev * layer_rng.normal());
    out.convs.push_back(std::move(c));
  }
  return out;
}

}  // namespace iristyle

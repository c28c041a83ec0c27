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

#ifndef IRISTYLE_BACKBONE_WEIGHTS_HPP_
#define IRISTYLE_BACKBONE_WEIGHTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace iristyle {

struct LayerDef {
  enum Kind { kConv, kRelu, kPool } kind;
  std::string name;           // conv name, relu tap name, or pool tap name
  int in_channels = 0;        // conv only
  int out_channels = 0;       // conv only
};

/// The 19-layer classification topology used for style work: 16 3x3 convs in
/// 5 blocks with 2x2 max pooling. Post-activation taps relu1_1..relu5_4 plus
/// the flattened last pool output, named final_encoding.
std::vector<LayerDef> vgg19_topology();

/// Compact 3-block conv net used as the frozen appearance feature extractor
/// for gaze regression (1 -> 8 -> 16 -> 32 channels, pool after each block).
std::vector<LayerDef> small_gaze_topology();

/// One convolution's parameters as stored on disk: float32, kernel layout
/// (out_channels, in_channels, 3, 3) row-major.
struct ConvWeights {
  std::string name;
  int in_channels = 0;
  int out_channels = 0;
  std::vector<float> kernel;  // out*in*9
  std::vector<float> bias;    // out
};

/// Serialized parameter set. Files start with magic "ISBW", a u16 version,
/// little-endian payload, and end with a FNV-1a checksum over the payload.
struct WeightsFile {
  std::vector<ConvWeights> convs;

  /// Hex FNV-1a 64 over every kernel/bias byte, in file order.
  std::string checksum() const;

  void save(const std::string& path) const;
  static WeightsFile load(const std::string& path);
};

/// Deterministic He-initialized parameters for a topology. Not a trained
/// network: desk-scale runs use these as a fixed random feature extractor.
WeightsFile make_random_weights(const std::vector<LayerDef>& topology,
                                std::uint64_t seed);

}  // namespace iristyle

#endif  // IRISTYLE_BACKBONE_WEIGHTS_HPP_

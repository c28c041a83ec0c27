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

#ifndef IRISTYLE_RECOGNITION_FAR_HPP_
#define IRISTYLE_RECOGNITION_FAR_HPP_

#include <functional>
#include <vector>

#include "iristyle/data/donor.hpp"
#include "iristyle/data/manifest.hpp"
#include "iristyle/parallel.hpp"
#include "iristyle/transfer/transfer.hpp"

namespace iristyle {

struct FarOptions {
  TransferConfig<float> transfer;
  int glint_threshold = kDefaultGlintThreshold;
  std::uint64_t seed = 42;
  bool apply_transfer = true;  // false measures the pre-transfer baseline
  int threads = 1;
};

struct FarResult {
  double far = 0;  // acceptances / attempts
  int acceptances = 0;
  int attempts = 0;
};

/// Malicious-use experiment: every probe image of user A is stylized with a
/// seeded random other user B's iris style, and an attempt counts as accepted
/// when the frozen classifier outputs B. `classify` maps an eye image plus
/// its mask to a predicted class index.
inline FarResult far_experiment(
    const Backbone<float>& backbone, const DatasetManifest& manifest,
    const std::vector<const DataRecord*>& probes,
    const std::function<int(const EyeImage&, const SegMask&)>& classify,
    const FarOptions& options) {
  require(!probes.empty(), "far_experiment needs at least one probe");
  const DonorSampler donors(manifest, options.seed);

  std::vector<std::uint8_t> accepted(probes.size(), 0);
  parallel_for(probes.size(), options.threads, [&](std::size_t i) {
    const DataRecord& probe = *probes[i];
    const DataRecord& donor = donors.donor_for(probe);
    require(donor.class_index >= 0, "donor record carries no class index");
    const EyeImage image = load_eye_image(probe);
    const SegMask mask = load_seg_mask(probe);
    int predicted;
    if (options.apply_transfer) {
      const EyeImage donor_image = load_eye_image(donor);
      const SegMask donor_mask = load_seg_mask(donor);
      const EyeImage stylized =
          stylize_eye(backbone, image, mask, donor_image, donor_mask,
                      options.glint_threshold, options.transfer);
      predicted = classify(stylized, mask);
    } else {
      predicted = classify(image, mask);
    }
    accepted[i] = predicted == donor.class_index ? 1 : 0;
  });

  FarResult result;
  result.attempts = static_cast<int>(probes.size());
  for (const auto a : accepted) result.acceptances += a;
  result.far = static_cast<double>(result.acceptances) / result.attempts;
  return result;
}

}  // namespace iristyle

#endif  // IRISTYLE_RECOGNITION_FAR_HPP_

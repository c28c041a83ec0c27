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

#ifndef IRISTYLE_DATA_DONOR_HPP_
#define IRISTYLE_DATA_DONOR_HPP_

#include <map>
#include <string>
#include <vector>

#include "iristyle/data/manifest.hpp"
#include "iristyle/rng.hpp"

namespace iristyle {

/// Seeded uniform sampling of style donors: for a content record of user A,
/// draw one record of a uniformly random other user. The pairing depends
/// only on (seed, record_id), so every experiment sharing a seed sees the
/// same content -> donor assignment.
class DonorSampler {
 public:
  DonorSampler(const DatasetManifest& manifest, std::uint64_t seed)
      : root_(Rng(seed).fork("donor")) {
    for (const auto& rec : manifest.records) pool_[rec.user_id].push_back(&rec);
    require(pool_.size() >= 2, "donor sampling needs at least two users");
    for (const auto& [user, recs] : pool_) users_.push_back(user);
  }

  const DataRecord& donor_for(const DataRecord& content) const {
    Rng rng = root_.fork(content.record_id);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < users_.size(); ++i)
      if (users_[i] != content.user_id) others.push_back(i);
    require(!others.empty(), "no other user available as a donor");
    const std::size_t pick = others[rng.uniform_index(others.size())];
    const auto& records = pool_.at(users_[pick]);
    return *records[static_cast<std::size_t>(rng.uniform_index(records.size()))];
  }

 private:
  Rng root_;
  std::map<std::string, std::vector<const DataRecord*>> pool_;
  std::vector<std::string> users_;
};

}  // namespace iristyle

#endif  // IRISTYLE_DATA_DONOR_HPP_

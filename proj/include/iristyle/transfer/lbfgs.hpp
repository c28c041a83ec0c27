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

#ifndef IRISTYLE_TRANSFER_LBFGS_HPP_
#define IRISTYLE_TRANSFER_LBFGS_HPP_

#include <deque>
#include <utility>

#include "iristyle/common.hpp"

namespace iristyle {

/// Limited-memory BFGS curvature history with the standard two-loop
/// recursion. The caller owns the line search and decides which pairs to keep.
template <typename Scalar>
class LbfgsHistory {
 public:
  explicit LbfgsHistory(int memory = 10) : memory_(memory) {}

  /// Quasi-Newton direction -H*g. Falls back to -g with an empty history.
  VectorX<Scalar> direction(const VectorX<Scalar>& grad) const {
    VectorX<Scalar> q = -grad;
    if (pairs_.empty()) return q;
    std::vector<Scalar> alpha(pairs_.size());
    for (std::size_t i = pairs_.size(); i-- > 0;) {
      const auto& [s, y] = pairs_[i];
      alpha[i] = rho_[i] * s.dot(q);
      q -= alpha[i] * y;
    }
    const auto& [s_last, y_last] = pairs_.back();
    q *= s_last.dot(y_last) / y_last.squaredNorm();
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto& [s, y] = pairs_[i];
      const Scalar beta = rho_[i] * y.dot(q);
      q += (alpha[i] - beta) * s;
    }
    return q;
  }

  /// Record a curvature pair; skipped unless s'y is safely positive.
  void push(VectorX<Scalar> s, VectorX<Scalar> y) {
    const Scalar sy = s.dot(y);
    if (!(sy > Scalar(1e-12) * s.norm() * y.norm())) return;
    pairs_.emplace_back(std::move(s), std::move(y));
    rho_.push_back(Scalar(1) / sy);
    if (static_cast<int>(pairs_.size()) > memory_) {
      pairs_.pop_front();
      rho_.pop_front();
    }
  }

 private:
  int memory_;
  std::deque<std::pair<VectorX<Scalar>, VectorX<Scalar>>> pairs_;
  std::deque<Scalar> rho_;
};

}  // namespace iristyle

#endif  // IRISTYLE_TRANSFER_LBFGS_HPP_

// Copyright 2026 The ActiveAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "activeaudit/ranking.h"

#include <algorithm>
#include <utility>
#include <vector>

#include "activeaudit/errors.h"
#include "activeaudit/simd/kernels.h"

namespace activeaudit {

std::uint64_t twice_mann_whitney_u(std::span<const double> pos, std::span<const double> neg) {
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, true);
  for (double s : neg) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::uint64_t twice_u = 0;
  std::uint64_t neg_below = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    std::uint64_t block_pos = 0, block_neg = 0;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? block_pos : block_neg) += 1;
      ++j;
    }
    twice_u += block_pos * (2 * neg_below + block_neg);
    neg_below += block_neg;
    i = j;
  }
  return twice_u;
}

std::optional<double> exact_auc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) return std::nullopt;
  const double pairs2 = 2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size());
  return static_cast<double>(twice_mann_whitney_u(pos, neg)) / pairs2;
}

double smooth_auc(std::span<const double> pos, std::span<const double> neg, double tau,
                  std::span<double> grad_pos, std::span<double> grad_neg) {
  if (!(tau > 0.0)) fail(ErrorCode::kInvalidRange, "tau must be positive");
  if (pos.empty() || neg.empty()) fail(ErrorCode::kDegenerateGroup, "empty positive or negative set");
  const bool want_grad = !grad_pos.empty() && !grad_neg.empty();
  if (want_grad) {
    std::fill(grad_pos.begin(), grad_pos.end(), 0.0);
    std::fill(grad_neg.begin(), grad_neg.end(), 0.0);
  }
  const double pairs = static_cast<double>(pos.size()) * static_cast<double>(neg.size());
  const double sum = simd::kernels().pair_sigmoid_sum(
      pos.data(), pos.size(), neg.data(), neg.size(), 1.0 / tau,
      want_grad ? grad_pos.data() : nullptr, want_grad ? grad_neg.data() : nullptr);
  if (want_grad) {
    for (double& g : grad_pos) g /= pairs;
    for (double& g : grad_neg) g /= pairs;
  }
  return sum / pairs;
}

}  // namespace activeaudit

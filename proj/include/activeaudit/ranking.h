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

#ifndef ACTIVEAUDIT_RANKING_H_
#define ACTIVEAUDIT_RANKING_H_

#include <cstdint>
#include <optional>
#include <span>

namespace activeaudit {

// Mann-Whitney pair count over positive/negative scores: twice the number of
// (pos > neg) pairs plus the number of ties. Exact integer arithmetic.
std::uint64_t twice_mann_whitney_u(std::span<const double> pos, std::span<const double> neg);

// Exact ROC-AUC with ties counted one half; nullopt when either side is empty.
std::optional<double> exact_auc(std::span<const double> pos, std::span<const double> neg);

// Mean over all (pos, neg) pairs of sigmoid((pos - neg) / tau). When the
// gradient spans are non-empty they receive d(value)/d(score) (overwritten).
double smooth_auc(std::span<const double> pos, std::span<const double> neg, double tau,
                  std::span<double> grad_pos = {}, std::span<double> grad_neg = {});

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_RANKING_H_

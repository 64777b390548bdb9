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

#ifndef ACTIVEAUDIT_METRICS_H_
#define ACTIVEAUDIT_METRICS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "activeaudit/pool.h"
#include "activeaudit/surrogate.h"

namespace activeaudit {

using ScoreMap = std::unordered_map<std::string, double>;

struct GroupAucResult {
  std::array<std::optional<double>, 2> auc;  // per group; nullopt when one label class is absent
  std::optional<double> delta;                // auc[0] - auc[1] when both defined
  std::array<std::size_t, 2> positives{};     // m_g
  std::array<std::size_t, 2> negatives{};     // n_g
};

// Standard ROC-AUC per group over `ids` (ties count one half).
GroupAucResult group_auc(const ScoreMap& scores, const AuditPool& pool, std::span<const std::string> ids);
// Row-indexed variant: scores[r] is the score of pool row rows[r].
GroupAucResult group_auc_rows(const AuditPool& pool, std::span<const std::size_t> rows,
                              std::span<const double> scores);
// Full-pool variant: scores aligned with pool rows.
GroupAucResult group_auc_pool(const AuditPool& pool, std::span<const double> scores);

// Difference of per-group mean sigmoid((h(x+) - h(x-)) / tau) over all
// within-group positive/negative pairs of the pool.
double smooth_delta_auc(const Surrogate& h, const AuditPool& pool, double tau);
double smooth_delta_auc_scores(const AuditPool& pool, std::span<const double> scores, double tau);

// ---- Error curves -------------------------------------------------------

struct CurvePoint {
  long long queries = 0;  // t
  double error = 0.0;     // e_t
  bool operator==(const CurvePoint&) const = default;
};

struct ErrorCurve {
  std::vector<CurvePoint> points;  // strictly increasing query counts
  long long seed = -1;             // -1 for a seed-averaged curve

  // Right-continuous step value at budget t; before the first point the first
  // logged error is held.
  double value_at(long long t) const;
};

// Mean across seeds at every budget logged by any curve; each curve is step-
// interpolated at budgets it did not log. Budgets outside a curve's range use
// its nearest end value.
ErrorCurve mean_curve(std::span<const ErrorCurve> curves);

struct Auec {
  double sum = 0.0;   // sum_{t=1..t_max} mean error (error x queries)
  double mean = 0.0;  // sum / t_max
};

// Throws kCurveTooShort unless the last logged budget reaches t_max.
Auec auec(const ErrorCurve& curve, long long t_max);

// First logged budget whose mean error is <= epsilon; nullopt if never.
std::optional<long long> queries_to_epsilon(const ErrorCurve& mean_curve, double epsilon);

// max(0, mu_min - truth, truth - mu_max).
double bound_violation(double mu_min, double mu_max, double truth);

// ceil((8/eps^2) ln(4/delta)) per group-label cell (balanced case).
std::int64_t mcdiarmid_sample_size(double epsilon, double delta);
// Unbalanced predicate: m n / (2 (m + n)) >= (2/eps^2) ln(4/delta).
bool mcdiarmid_sufficient(std::size_t positives, std::size_t negatives, double epsilon, double delta);

// ---- Summary statistics -------------------------------------------------

double mean(std::span<const double> v);
double sample_sd(std::span<const double> v);  // n - 1 denominator; 0 when n < 2
double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);  // average ranks for ties

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_METRICS_H_

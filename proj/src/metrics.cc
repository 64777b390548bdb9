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

#include "activeaudit/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "activeaudit/errors.h"
#include "activeaudit/ranking.h"

namespace activeaudit {

GroupAucResult group_auc_rows(const AuditPool& pool, std::span<const std::size_t> rows,
                              std::span<const double> scores) {
  std::array<std::vector<double>, 2> pos, neg;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const AuditExample& ex = pool.at(rows[i]);
    (ex.label == 1 ? pos : neg)[ex.group].push_back(scores[i]);
  }
  GroupAucResult out;
  for (int g = 0; g < 2; ++g) {
    out.positives[g] = pos[g].size();
    out.negatives[g] = neg[g].size();
    out.auc[g] = exact_auc(pos[g], neg[g]);
  }
  if (out.auc[0] && out.auc[1]) out.delta = *out.auc[0] - *out.auc[1];
  return out;
}

GroupAucResult group_auc(const ScoreMap& scores, const AuditPool& pool, std::span<const std::string> ids) {
  std::vector<std::size_t> rows;
  std::vector<double> values;
  rows.reserve(ids.size());
  values.reserve(ids.size());
  for (const std::string& id : ids) {
    auto it = scores.find(id);
    if (it == scores.end()) fail(ErrorCode::kMissingScore, id);
    rows.push_back(pool.require_row(id));
    values.push_back(it->second);
  }
  return group_auc_rows(pool, rows, values);
}

GroupAucResult group_auc_pool(const AuditPool& pool, std::span<const double> scores) {
  std::vector<std::size_t> rows(pool.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return group_auc_rows(pool, rows, scores);
}

double smooth_delta_auc_scores(const AuditPool& pool, std::span<const double> scores, double tau) {
  if (!(tau > 0.0)) fail(ErrorCode::kInvalidRange, "tau must be positive");
  std::array<std::vector<double>, 2> pos, neg;
  for (std::size_t r = 0; r < pool.size(); ++r) {
    const AuditExample& ex = pool.at(r);
    (ex.label == 1 ? pos : neg)[ex.group].push_back(scores[r]);
  }
  for (int g = 0; g < 2; ++g) {
    if (pos[g].empty() || neg[g].empty()) fail(ErrorCode::kDegenerateGroup, "group " + std::to_string(g));
  }
  return smooth_auc(pos[0], neg[0], tau) - smooth_auc(pos[1], neg[1], tau);
}

double smooth_delta_auc(const Surrogate& h, const AuditPool& pool, double tau) {
  const std::vector<double> scores = h.forward_all(FeatureView::of(pool));
  return smooth_delta_auc_scores(pool, scores, tau);
}

// ---- Error curves -------------------------------------------------------

double ErrorCurve::value_at(long long t) const {
  if (points.empty()) fail(ErrorCode::kCurveTooShort, "empty curve");
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](long long q, const CurvePoint& p) { return q < p.queries; });
  if (it == points.begin()) return points.front().error;
  return std::prev(it)->error;
}

ErrorCurve mean_curve(std::span<const ErrorCurve> curves) {
  std::vector<long long> budgets;
  for (const auto& c : curves) {
    for (const auto& p : c.points) budgets.push_back(p.queries);
  }
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  ErrorCurve out;
  for (long long t : budgets) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& c : curves) {
      if (c.points.empty()) continue;
      sum += c.value_at(t);
      ++n;
    }
    if (n > 0) out.points.push_back({t, sum / static_cast<double>(n)});
  }
  return out;
}

Auec auec(const ErrorCurve& curve, long long t_max) {
  if (t_max < 1) fail(ErrorCode::kInvalidRange, "t_max must be >= 1");
  if (curve.points.empty() || curve.points.back().queries < t_max) {
    fail(ErrorCode::kCurveTooShort, "curve ends before t_max=" + std::to_string(t_max));
  }
  Auec out;
  for (long long t = 1; t <= t_max; ++t) out.sum += curve.value_at(t);
  out.mean = out.sum / static_cast<double>(t_max);
  return out;
}

std::optional<long long> queries_to_epsilon(const ErrorCurve& curve, double epsilon) {
  for (const auto& p : curve.points) {
    if (p.error <= epsilon) return p.queries;
  }
  return std::nullopt;
}

double bound_violation(double mu_min, double mu_max, double truth) {
  if (mu_min > mu_max) fail(ErrorCode::kInvertedInterval, "mu_min > mu_max");
  return std::max({0.0, mu_min - truth, truth - mu_max});
}

namespace {
void check_eps_delta(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::kInvalidRange, "epsilon must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::kInvalidRange, "delta must be in (0,1)");
}
}  // namespace

std::int64_t mcdiarmid_sample_size(double epsilon, double delta) {
  check_eps_delta(epsilon, delta);
  const long double value = 8.0L / (static_cast<long double>(epsilon) * epsilon) *
                            std::log(4.0L / static_cast<long double>(delta));
  return static_cast<std::int64_t>(std::ceil(value));
}

bool mcdiarmid_sufficient(std::size_t positives, std::size_t negatives, double epsilon, double delta) {
  check_eps_delta(epsilon, delta);
  if (positives == 0 || negatives == 0) return false;
  const long double m = positives, n = negatives;
  const long double lhs = m * n / (2.0L * (m + n));
  const long double rhs = 2.0L / (static_cast<long double>(epsilon) * epsilon) *
                          std::log(4.0L / static_cast<long double>(delta));
  return lhs >= rhs;
}

// ---- Summary statistics -------------------------------------------------

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {
std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}
}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

}  // namespace activeaudit

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

#include <cmath>
#include <random>

#include "oracles.h"
#include "test_util.h"

namespace activeaudit {
namespace {

AuditPool pool_from(const std::vector<int>& groups, const std::vector<int>& labels) {
  std::vector<AuditExample> ex;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    ex.push_back({"i" + std::to_string(i), {static_cast<double>(i)}, groups[i], labels[i], std::nullopt});
  }
  return AuditPool::from_examples(std::move(ex));
}

TEST(GroupAuc, PerfectSymmetricRanking) {
  const AuditPool pool = pool_from({0, 0, 0, 0, 1, 1, 1, 1}, {1, 1, 0, 0, 1, 1, 0, 0});
  ScoreMap s;
  const double v[] = {0.9, 0.8, 0.3, 0.1};
  for (int i = 0; i < 8; ++i) s["i" + std::to_string(i)] = v[i % 4];
  std::vector<std::string> ids;
  for (const auto& e : pool.examples()) ids.push_back(e.id);
  const GroupAucResult r = group_auc(s, pool, ids);
  EXPECT_EQ(*r.auc[0], 1.0);
  EXPECT_EQ(*r.auc[1], 1.0);
  EXPECT_EQ(*r.delta, 0.0);
  EXPECT_EQ(r.positives[0], 2u);
  EXPECT_EQ(r.negatives[1], 2u);
}

TEST(GroupAuc, SingleLabelClassLeavesDeltaMissing) {
  const AuditPool pool = pool_from({0, 0, 1, 1}, {1, 1, 1, 0});
  ScoreMap s{{"i0", 0.2}, {"i1", 0.4}, {"i2", 0.9}, {"i3", 0.1}};
  const std::vector<std::string> ids{"i0", "i1", "i2", "i3"};
  const GroupAucResult r = group_auc(s, pool, ids);
  EXPECT_FALSE(r.auc[0].has_value());
  EXPECT_EQ(*r.auc[1], 1.0);
  EXPECT_FALSE(r.delta.has_value());
}

TEST(GroupAuc, MissingScoreNamesTheId) {
  const AuditPool pool = pool_from({0, 1}, {0, 1});
  const std::vector<std::string> ids{"i0", "i1"};
  try {
    group_auc(ScoreMap{{"i0", 0.5}}, pool, ids);
    FAIL();
  } catch (const AuditError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingScore);
    EXPECT_EQ(e.detail(), "i1");
  }
}

TEST(GroupAuc, MatchesBruteForceWithTies) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 100;
    std::vector<int> g(n), y(n);
    ScoreMap s;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = static_cast<int>(rng() % 2);
      y[i] = static_cast<int>(rng() % 2);
    }
    const AuditPool pool = pool_from(g, y);
    std::array<std::vector<double>, 2> pos, neg;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(rng() % 20) / 20.0;  // many ties
      s["i" + std::to_string(i)] = v;
      ids.push_back("i" + std::to_string(i));
      (y[i] ? pos : neg)[g[i]].push_back(v);
    }
    const GroupAucResult r = group_auc(s, pool, ids);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(r.auc[k], oracles::brute_auc(pos[k], neg[k]));
  }
}

TEST(GroupAuc, RankInvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const AuditPool pool = testing::random_pool(200, 1, 3);
  std::vector<double> s(pool.size()), t(pool.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    t[i] = std::exp(3.0 * s[i]) - 7.0;
  }
  EXPECT_EQ(group_auc_pool(pool, s).delta, group_auc_pool(pool, t).delta);
}

TEST(SmoothDeltaAuc, ConstantScorerGivesZero) {
  const AuditPool pool = testing::random_pool(50, 2, 0);
  const Surrogate zero(Architecture::linear(), 2, {0.0, 0.0, 0.0});
  EXPECT_EQ(smooth_delta_auc(zero, pool, 0.05), 0.0);
}

TEST(SmoothDeltaAuc, SmallTauApproachesExact) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const AuditPool pool = testing::random_pool(120, 1, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(pool.size());
    for (double& v : s) v = u(rng);
    // Separate every pair by well over tau so the sigmoid is saturated.
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i) * 0.01 + 0.001 * s[i];
    std::shuffle(s.begin(), s.end(), rng);
    const double exact = *group_auc_pool(pool, s).delta;
    EXPECT_NEAR(smooth_delta_auc_scores(pool, s, 1e-4), exact, 1e-6);
  }
}

TEST(SmoothDeltaAuc, HandEnumerationAtTauOne) {
  // Group 0: pos (0.9, 0.8) neg (0.3, 0.1); group 1: pos (0.6) neg (0.5, 0.7).
  const AuditPool pool = pool_from({0, 0, 0, 0, 1, 1, 1}, {1, 1, 0, 0, 1, 0, 0});
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1, 0.6, 0.5, 0.7};
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  const double g0 = (sig(0.6) + sig(0.8) + sig(0.5) + sig(0.7)) / 4.0;
  const double g1 = (sig(0.1) + sig(-0.1)) / 2.0;
  EXPECT_NEAR(smooth_delta_auc_scores(pool, s, 1.0), g0 - g1, 1e-15);
}

TEST(SmoothDeltaAuc, DegenerateGroupRejected) {
  const AuditPool pool = pool_from({0, 0, 1, 1}, {1, 0, 1, 1});
  EXPECT_AUDIT_ERROR(smooth_delta_auc_scores(pool, std::vector<double>{0.1, 0.2, 0.3, 0.4}, 0.1),
                     ErrorCode::kDegenerateGroup);
}

TEST(SmoothDeltaAuc, ContractsTowardHalfAsTauGrows) {
  const AuditPool pool = testing::random_pool(80, 1, 8);
  std::vector<double> s(pool.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = pool.features(i)[0] + 0.5 * pool.at(i).label;
  double prev = std::fabs(smooth_delta_auc_scores(pool, s, 0.01));
  for (double tau : {0.1, 1.0, 10.0, 100.0}) {
    const double v = std::fabs(smooth_delta_auc_scores(pool, s, tau));
    EXPECT_LE(v, prev + 1e-12) << tau;
    prev = v;
  }
}

TEST(Auec, RectangleZeroAndTwoSegments) {
  EXPECT_NEAR(auec(ErrorCurve{{{1, 0.1}, {10, 0.1}}}, 10).sum, 1.0, 1e-12);
  EXPECT_EQ(auec(ErrorCurve{{{1, 0.0}, {10, 0.0}}}, 10).sum, 0.0);
  const Auec a = auec(ErrorCurve{{{1, 0.2}, {6, 0.1}, {10, 0.1}}}, 10);
  EXPECT_NEAR(a.sum, 1.5, 1e-12);
  EXPECT_NEAR(a.mean, 0.15, 1e-12);
  EXPECT_AUDIT_ERROR(auec(ErrorCurve{{{1, 0.2}, {6, 0.1}}}, 10), ErrorCode::kCurveTooShort);
}

TEST(QueriesToEpsilon, FirstCrossingOrNotReached) {
  const ErrorCurve c{{{100, 0.08}, {200, 0.04}, {300, 0.01}}};
  EXPECT_EQ(queries_to_epsilon(c, 0.05), 200);
  EXPECT_FALSE(queries_to_epsilon(c, 0.005).has_value());
}

TEST(MeanCurve, StepInterpolatesMissingBudgets) {
  const ErrorCurve a{{{4, 0.2}, {20, 0.1}}};
  const ErrorCurve b{{{4, 0.4}, {12, 0.0}, {20, 0.2}}};
  const ErrorCurve m = mean_curve(std::vector<ErrorCurve>{a, b});
  ASSERT_EQ(m.points.size(), 3u);
  EXPECT_NEAR(m.points[1].error, 0.1, 1e-15);  // a holds 0.2 at t = 12
  EXPECT_NEAR(m.points[2].error, 0.15, 1e-15);
}

TEST(BoundViolation, InsideAboveBelowInverted) {
  EXPECT_EQ(bound_violation(0.10, 0.20, 0.15), 0.0);
  EXPECT_NEAR(bound_violation(0.10, 0.20, 0.25), 0.05, 1e-15);
  EXPECT_NEAR(bound_violation(0.10, 0.20, 0.08), 0.02, 1e-15);
  EXPECT_AUDIT_ERROR(bound_violation(0.2, 0.1, 0.15), ErrorCode::kInvertedInterval);
}

TEST(Mcdiarmid, ClosedFormValues) {
  // 3200 ln 80 = 14022.9...; 200 ln 8 = 415.888...
  EXPECT_EQ(mcdiarmid_sample_size(0.05, 0.05), 14023);
  EXPECT_EQ(mcdiarmid_sample_size(0.2, 0.5), 416);
  EXPECT_EQ(mcdiarmid_sample_size(0.05, 0.1), 11805);
  EXPECT_EQ(mcdiarmid_sample_size(0.02, 0.05), 87641);
  EXPECT_EQ(mcdiarmid_sample_size(0.02, 0.1), 73778);
  EXPECT_AUDIT_ERROR(mcdiarmid_sample_size(0.0, 0.1), ErrorCode::kInvalidRange);
  EXPECT_AUDIT_ERROR(mcdiarmid_sample_size(0.1, 1.0), ErrorCode::kInvalidRange);
}

TEST(Mcdiarmid, QuadraticInInverseEpsilonAndMonotone) {
  for (double eps : {0.2, 0.1, 0.05}) {
    const double ratio = static_cast<double>(mcdiarmid_sample_size(eps / 2, 0.05)) /
                         static_cast<double>(mcdiarmid_sample_size(eps, 0.05));
    EXPECT_NEAR(ratio, 4.0, 0.01);
  }
  std::int64_t prev = mcdiarmid_sample_size(0.01, 0.01);
  for (double eps = 0.02; eps < 0.9; eps += 0.01) {
    const auto v = mcdiarmid_sample_size(eps, 0.01);
    EXPECT_LE(v, prev);
    prev = v;
  }
  prev = mcdiarmid_sample_size(0.1, 0.01);
  for (double delta = 0.02; delta < 0.99; delta += 0.01) {
    const auto v = mcdiarmid_sample_size(0.1, delta);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Mcdiarmid, UnbalancedPredicate) {
  // (2/eps^2) ln(4/delta) at (0.1, 0.05) = 876.4...; m n / (2 (m + n)) with m = n = 3600 is 900.
  EXPECT_TRUE(mcdiarmid_sufficient(3600, 3600, 0.1, 0.05));
  EXPECT_FALSE(mcdiarmid_sufficient(3400, 3400, 0.1, 0.05));
}

TEST(SummaryStats, SampleSdAndCorrelations) {
  const std::vector<double> e{0.01, 0.03};
  EXPECT_NEAR(mean(e), 0.02, 1e-15);
  EXPECT_NEAR(sample_sd(e), 0.0141421356, 1e-9);
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{1, 3, 2, 10};
  EXPECT_NEAR(pearson(a, b), 1.0, 1e-12);
  EXPECT_NEAR(spearman(a, c), 0.8, 1e-12);
}

}  // namespace
}  // namespace activeaudit

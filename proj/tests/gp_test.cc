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

#include "activeaudit/gp.h"

#include <cmath>
#include <random>

#include "oracles.h"
#include "test_util.h"

namespace activeaudit {
namespace {

using Points = std::vector<std::vector<double>>;

Points random_points(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Points x(n, std::vector<double>(d));
  for (auto& row : x) {
    for (double& v : row) v = u(rng);
  }
  return x;
}

TEST(Kernel, ClosedForms) {
  const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  KernelParams rbf{KernelKind::kRbf, 5.0, 2.0};
  EXPECT_NEAR(kernel_value(rbf, a, b), 2.0 * std::exp(-0.5), 1e-15);
  KernelParams m52{KernelKind::kMatern52, 5.0, 2.0};
  const double r = std::sqrt(5.0);
  EXPECT_NEAR(kernel_value(m52, a, b), 2.0 * (1.0 + r + 5.0 / 3.0) * std::exp(-r), 1e-15);
  EXPECT_EQ(kernel_value(m52, a, a), 2.0);
  EXPECT_EQ(kernel_value(m52, a, b), kernel_value(m52, b, a));
}

TEST(MedianHeuristic, SmallCases) {
  EXPECT_EQ(median_heuristic({{0.0}, {1.0}, {3.0}}), 2.0);  // distances 1, 2, 3
  EXPECT_EQ(median_heuristic({{0.0}, {1.0}, {3.0}, {7.0}}), 3.5);  // 1,2,3,4,6,7
  EXPECT_EQ(median_heuristic({{1.0}}), 1.0);
  EXPECT_EQ(median_heuristic({{1.0}, {1.0}}), 1.0);
}

TEST(Gp, SinglePointClosedForm) {
  KernelParams k{KernelKind::kRbf, 1.0, 1.5};
  const GpModel m = fit_gp({{0.0}}, {2.0}, k, 0.5);
  const GpPrediction p = gp_predict(m, {{0.0}, {1.0}});
  const double denom = 1.5 + 0.5 + m.jitter();
  EXPECT_NEAR(p.mean[0], 1.5 * 2.0 / denom, 1e-12);
  const double k01 = 1.5 * std::exp(-0.5);
  EXPECT_NEAR(p.mean[1], k01 * 2.0 / denom, 1e-12);
  EXPECT_NEAR(p.variance[0], 1.5 - 1.5 * 1.5 / denom, 1e-12);
  EXPECT_NEAR(p.variance[1], 1.5 - k01 * k01 / denom, 1e-12);
}

TEST(Gp, TwoPointClosedForm) {
  KernelParams k{KernelKind::kRbf, 1.0, 1.0};
  const GpModel m = fit_gp({{0.0}, {1.0}}, {1.0, -1.0}, k, 0.1);
  const double a = 1.0 + 0.1 + m.jitter(), c = std::exp(-0.5);
  const double det = a * a - c * c;
  // [a c; c a]^-1 y
  const double al0 = (a * 1.0 - c * -1.0) / det, al1 = (-c * 1.0 + a * -1.0) / det;
  const double kt0 = std::exp(-0.125), kt1 = std::exp(-0.125);  // test at 0.5
  const GpPrediction p = gp_predict(m, {{0.5}});
  EXPECT_NEAR(p.mean[0], kt0 * al0 + kt1 * al1, 1e-12);
  EXPECT_NEAR(p.mean[0], 0.0, 1e-12);
  const double quad = (a * kt0 * kt0 - 2 * c * kt0 * kt1 + a * kt1 * kt1) / det;
  EXPECT_NEAR(p.variance[0], 1.0 - quad, 1e-12);
}

TEST(Gp, NoiselessInterpolation) {
  std::mt19937_64 rng(3);
  for (KernelKind kind : {KernelKind::kRbf, KernelKind::kMatern52}) {
    const Points x = random_points(15, 3, rng);
    std::vector<double> y;
    for (const auto& p : x) y.push_back(std::sin(p[0]) + p[1] * p[2]);
    const GpModel m = fit_gp(x, y, {kind, median_heuristic(x), 1.0}, 0.0);
    const GpPrediction p = gp_predict(m, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(p.mean[i], y[i], 1e-6);
      EXPECT_LE(p.variance[i], 1e-6);
    }
  }
}

TEST(Gp, FarFieldRevertsToPrior) {
  const GpModel m = fit_gp({{0.0, 0.0}, {1.0, 0.0}}, {3.0, -2.0}, {KernelKind::kMatern52, 1.0, 2.5}, 0.01);
  const GpPrediction p = gp_predict(m, {{1e3, 1e3}});
  EXPECT_NEAR(p.mean[0], 0.0, 1e-12);
  EXPECT_NEAR(p.variance[0], 2.5, 1e-12);
}

TEST(Gp, AgreesWithDenseSolver) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Points x = random_points(10, 2, rng);
    std::vector<double> y(10);
    for (double& v : y) v = nd(rng);
    const KernelKind kind = trial % 2 ? KernelKind::kRbf : KernelKind::kMatern52;
    const GpModel m = fit_gp(x, y, {kind, 0.5 + 0.05 * trial, 1.0 + 0.1 * (trial % 5)}, 0.01 * (trial % 3));
    const Points test = random_points(8, 2, rng);
    const GpPrediction got = gp_predict(m, test);
    const GpPrediction want = oracles::dense_gp(m, test);
    for (std::size_t i = 0; i < test.size(); ++i) {
      EXPECT_NEAR(got.mean[i], want.mean[i], 1e-8) << trial;
      EXPECT_NEAR(got.variance[i], want.variance[i], 1e-8) << trial;
    }
  }
}

TEST(Gp, VarianceNeverGrowsWithMoreData) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Points all = random_points(12, 2, rng);
    const Points test = random_points(30, 2, rng);
    const KernelParams k{KernelKind::kMatern52, 1.0, 1.0};
    std::vector<double> prev(test.size(), 1.0);
    for (std::size_t n = 1; n <= all.size(); ++n) {
      const Points x(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
      const GpModel m = fit_gp(x, std::vector<double>(n, 0.3), k, 0.05);
      const GpPrediction p = gp_predict(m, test);
      for (std::size_t i = 0; i < test.size(); ++i) {
        EXPECT_LE(p.variance[i], prev[i] + 1e-12);
        prev[i] = p.variance[i];
      }
    }
  }
}

TEST(Gp, VarianceGrowsWithDistanceFromSinglePoint) {
  const GpModel m = fit_gp({{0.0}}, {1.0}, {KernelKind::kRbf, 1.0, 1.0}, 0.01);
  double prev = -1.0;
  for (double t = 0.0; t < 5.0; t += 0.25) {
    const double v = gp_predict(m, {{t}}).variance[0];
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Gp, DuplicatePointsNeedJitterOnly) {
  const GpModel m = fit_gp({{1.0}, {1.0}, {1.0}}, {0.5, 0.5, 0.5}, {KernelKind::kRbf, 1.0, 1.0}, 0.0);
  EXPECT_GT(m.jitter(), 0.0);
  EXPECT_LE(m.jitter(), 1e-2);
  EXPECT_NEAR(gp_predict(m, {{1.0}}).mean[0], 0.5, 1e-4);
}

TEST(Gp, ErrorsAreTyped) {
  const KernelParams k{};
  EXPECT_AUDIT_ERROR(fit_gp({}, {}, k, 0.1), ErrorCode::kPrecondition);
  EXPECT_AUDIT_ERROR(fit_gp({{1.0}}, {1.0, 2.0}, k, 0.1), ErrorCode::kDimensionMismatch);
  EXPECT_AUDIT_ERROR(fit_gp({{1.0}}, {1.0}, {KernelKind::kRbf, -1.0, 1.0}, 0.1), ErrorCode::kInvalidRange);
  EXPECT_AUDIT_ERROR(gp_predict(GpModel{}, {{1.0}}), ErrorCode::kUnfittedGp);
  const GpModel m = fit_gp({{1.0, 2.0}}, {1.0}, k, 0.1);
  EXPECT_AUDIT_ERROR(gp_predict(m, {{1.0}}), ErrorCode::kDimensionMismatch);
}

TEST(Gp, NonFiniteInputRejected) {
  const double nan = std::nan("");
  EXPECT_AUDIT_ERROR(fit_gp({{nan}, {1.0}}, {1.0, 2.0}, KernelParams{}, 0.0), ErrorCode::kPrecondition);
}

TEST(Gp, JitterCannotRescueHugeSignalVariance) {
  // At sigma_f^2 = 1e20 the largest jitter is below one ulp of the diagonal.
  const KernelParams k{KernelKind::kRbf, 1.0, 1e20};
  EXPECT_AUDIT_ERROR(fit_gp({{1.0}, {1.0}, {1.0}}, {0.0, 0.0, 0.0}, k, 0.0), ErrorCode::kSingularKernel);
}

}  // namespace
}  // namespace activeaudit

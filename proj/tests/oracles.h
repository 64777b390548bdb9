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

// Slow, obviously-correct reference computations shared by the unit tests
// and the acceptance run. None of these call the code under test except
// where a value is only being fed through (kernel_value, cosine_similarity).

#ifndef ACTIVEAUDIT_TESTS_ORACLES_H_
#define ACTIVEAUDIT_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "activeaudit/cerm.h"
#include "activeaudit/gp.h"
#include "activeaudit/metrics.h"
#include "activeaudit/selection.h"
#include "test_util.h"

namespace activeaudit::oracles {

// O(m n) pair count, the textbook definition.
inline std::optional<double> brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  if (pos.empty() || neg.empty()) return std::nullopt;
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Quota rule with ceil excesses compared as exact integer numerators.
inline std::vector<std::size_t> quotas(const std::vector<std::size_t>& sizes, std::size_t n) {
  unsigned long long total = 0;
  for (auto s : sizes) total += s;
  std::vector<std::size_t> q(sizes.size());
  std::vector<std::pair<unsigned long long, std::size_t>> excess;
  std::size_t sum = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const unsigned long long num = static_cast<unsigned long long>(n) * sizes[i];
    q[i] = static_cast<std::size_t>((num + total - 1) / total);
    sum += q[i];
    excess.emplace_back(q[i] * total - num, i);  // (ceil - exact) * total
  }
  std::sort(excess.begin(), excess.end(),
            [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second > b.second; });
  for (std::size_t j = 0; j < sum - n; ++j) --q[excess[j].second];
  return q;
}

// Gaussian elimination with partial pivoting in long double.
inline std::vector<long double> dense_solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<long double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// GP posterior from the normal equations, same kernel, noise and jitter.
inline GpPrediction dense_gp(const GpModel& m, const std::vector<std::vector<double>>& test) {
  const auto& x = m.train_inputs();
  const std::size_t n = x.size();
  std::vector<std::vector<long double>> k(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i][j] = kernel_value(m.kernel(), x[i], x[j]);
    k[i][i] += m.noise() + m.jitter();
  }
  const auto alpha = dense_solve(k, {m.train_targets().begin(), m.train_targets().end()});
  GpPrediction out;
  for (const auto& t : test) {
    std::vector<long double> ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[i] = kernel_value(m.kernel(), x[i], t);
    long double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += ks[i] * alpha[i];
    const auto v = dense_solve(k, ks);
    long double var = kernel_value(m.kernel(), t, t);
    for (std::size_t i = 0; i < n; ++i) var -= ks[i] * v[i];
    out.mean.push_back(static_cast<double>(mean));
    out.variance.push_back(std::max(0.0, static_cast<double>(var)));
  }
  return out;
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// One-parameter certificate instance: 20 points in one dimension,
// h(x) = sigmoid(w x), up to four of them queried from a hidden w*.
// Tolerances vary so the feasible w-interval sometimes straddles 0.
struct GridInstance {
  AuditPool pool;
  QueriedSet s;
  double lambda = 0.0;
};

inline GridInstance grid_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridInstance inst{testing::random_pool(20, 1, seed + 100), {}, 0.0};
  const double w_star = 3.0 * u(rng);
  const double lambdas[] = {0.01, 0.05, 0.2};
  inst.lambda = lambdas[seed % 3];
  std::vector<std::size_t> rows{0, 1, 2, 3};
  std::shuffle(rows.begin(), rows.end(), rng);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t r = 4 + (rng() % 16);
    if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows[i] = r;
  }
  for (std::size_t r : rows) {
    if (inst.s.contains(inst.pool.at(r).id)) continue;
    inst.s.add(inst.pool, inst.pool.at(r).id, logistic(w_star * inst.pool.features(r)[0]));
  }
  return inst;
}

// Exact Delta-AUC extremes over a fine w grid on [-box, box] restricted to
// the version space. first > second when nothing is feasible.
inline std::pair<double, double> grid_extremes(const GridInstance& inst, double box) {
  double lo = 1e9, hi = -1e9;
  std::vector<double> scores(inst.pool.size());
  for (int k = -50000; k <= 50000; ++k) {
    const double w = box * k / 50000.0;
    bool feasible = true;
    for (const auto& e : inst.s.entries()) {
      if (std::fabs(logistic(w * inst.pool.features(e.row)[0]) - e.score) > inst.lambda) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    for (std::size_t r = 0; r < scores.size(); ++r) scores[r] = w * inst.pool.features(r)[0];
    const double d = *group_auc_pool(inst.pool, scores).delta;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

inline CermSettings grid_settings(const GridInstance& inst) {
  CermSettings c;
  c.arch = Architecture::linear(false);
  c.lambda = inst.lambda;
  c.box_bound = 5.0;
  c.epochs = 10;
  return c;
}

inline double mean_pairwise_cosine(const std::vector<std::vector<double>>& phi, const std::vector<std::size_t>& idx) {
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b, ++pairs) sum += cosine_similarity(phi[idx[a]], phi[idx[b]]);
  }
  return pairs ? sum / pairs : 0.0;
}

// Relative l2 error of the analytic gradient against central differences.
inline double gradient_rel_error(Surrogate h, const FeatureView& x, const Objective& obj) {
  const LossAndGrad lg = loss_and_grad(h, x, obj);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lg.grad.size(); ++i) {
    const double keep = h.params()[i];
    const double step = 1e-6;
    h.mutable_params()[i] = keep + step;
    const double up = evaluate_objective(h, x, obj);
    h.mutable_params()[i] = keep - step;
    const double down = evaluate_objective(h, x, obj);
    h.mutable_params()[i] = keep;
    const double fd = (up - down) / (2.0 * step);
    num += (lg.grad[i] - fd) * (lg.grad[i] - fd);
    den += fd * fd;
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

// Sum, score-match and smooth Delta-AUC terms with random coefficients.
inline Objective mixed_objective(const AuditPool& pool, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScoreSumTerm sum;
  ScoreMatchTerm match;
  match.tolerance = 0.01;
  match.quadratic_weight = 3.0;
  for (std::size_t r = 0; r < pool.size(); r += 3) {
    sum.rows.push_back(r);
    sum.weights.push_back(u(rng) - 0.5);
    match.rows.push_back(r);
    match.targets.push_back(u(rng));
    match.multipliers.push_back(u(rng));
  }
  SmoothDeltaAucTerm auc;
  auc.pairs = group_pair_rows(pool);
  auc.tau = 0.1;
  auc.weight = -1.0;
  return Objective{{sum, match, auc}};
}

}  // namespace activeaudit::oracles

#endif  // ACTIVEAUDIT_TESTS_ORACLES_H_

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

#include "activeaudit/cerm.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "activeaudit/errors.h"
#include "activeaudit/hashing.h"
#include "activeaudit/metrics.h"

namespace activeaudit {

void QueriedSet::add(const AuditPool& pool, const std::string& id, double score) {
  const std::size_t row = pool.require_row(id);
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    fail(ErrorCode::kInvalidRange, "score of " + id + " outside [0,1]");
  }
  if (seen_.size() < pool.size()) seen_.resize(pool.size(), 0);
  if (seen_[row]) fail(ErrorCode::kDuplicateId, id);
  seen_[row] = 1;
  entries_.push_back({row, id, score});
}

bool QueriedSet::contains(const std::string& id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return true;
  }
  return false;
}

std::vector<std::size_t> QueriedSet::rows() const {
  std::vector<std::size_t> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.row);
  return out;
}

std::vector<double> QueriedSet::scores() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.score);
  return out;
}

double feasibility_check(const Surrogate& h, const AuditPool& pool, const QueriedSet& s, double lambda) {
  const auto rows = s.rows();
  std::vector<double> scores(rows.size());
  h.forward_rows(FeatureView::of(pool), rows, scores);
  double gap = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    gap = std::max(gap, std::fabs(scores[i] - s.entries()[i].score) - lambda);
  }
  return gap;
}

namespace {

constexpr std::uint64_t kSubsampleStream = 0x73756273;

class Adam {
 public:
  explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad, double lr, double box) {
    ++t_;
    const double c1 = 1.0 - std::pow(0.9, t_);
    const double c2 = 1.0 - std::pow(0.999, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = 0.9 * m_[i] + 0.1 * grad[i];
      v_[i] = 0.999 * v_[i] + 0.001 * grad[i] * grad[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + 1e-8);
      if (box > 0.0) params[i] = std::clamp(params[i], -box, box);
    }
  }

 private:
  std::vector<double> m_, v_;
  int t_ = 0;
};

void require_groups(const GroupPairRows& pairs) {
  for (int g = 0; g < 2; ++g) {
    if (pairs.pos[g].empty() || pairs.neg[g].empty()) {
      fail(ErrorCode::kDegenerateGroup, "group " + std::to_string(g) + " lacks positives or negatives");
    }
  }
}

// Seeded per-group subsample, label-stratified within the group.
GroupPairRows subsample_pairs(const AuditPool& pool, const GroupPairRows& full, std::size_t per_group,
                              std::uint64_t seed) {
  if (per_group == 0) return full;
  GroupPairRows out;
  for (int g = 0; g < 2; ++g) {
    const double total = static_cast<double>(full.pos[g].size() + full.neg[g].size());
    if (total <= static_cast<double>(per_group)) {
      out.pos[g] = full.pos[g];
      out.neg[g] = full.neg[g];
      continue;
    }
    auto take = [&](const std::vector<std::size_t>& rows) {
      std::size_t want = static_cast<std::size_t>(
          std::llround(static_cast<double>(per_group) * static_cast<double>(rows.size()) / total));
      want = std::clamp<std::size_t>(want, 1, rows.size());
      std::vector<std::pair<double, std::size_t>> keyed;
      keyed.reserve(rows.size());
      for (std::size_t r : rows) keyed.emplace_back(hash_uniform(seed, kSubsampleStream, pool.at(r).id), r);
      std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(want), keyed.end());
      std::vector<std::size_t> picked;
      for (std::size_t i = 0; i < want; ++i) picked.push_back(keyed[i].second);
      std::sort(picked.begin(), picked.end());
      return picked;
    };
    out.pos[g] = take(full.pos[g]);
    out.neg[g] = take(full.neg[g]);
  }
  return out;
}

struct Candidate {
  std::vector<double> params;
  double gap = std::numeric_limits<double>::infinity();
  double objective = std::numeric_limits<double>::infinity();  // minimised
};

bool better(const Candidate& a, const Candidate& b, double tie) {
  if (a.gap <= tie && b.gap <= tie) return a.objective < b.objective;
  if (a.gap != b.gap) return a.gap < b.gap;
  return a.objective < b.objective;
}

}  // namespace

ExtremalResult solve_extremal(Direction direction, const QueriedSet& s, const AuditPool& pool,
                              const CermSettings& settings, const Surrogate& init) {
  if (s.empty()) fail(ErrorCode::kPrecondition, "queried set is empty");
  if (!(settings.lambda > 0.0)) fail(ErrorCode::kInvalidRange, "lambda must be > 0");
  if (!(settings.tau > 0.0)) fail(ErrorCode::kInvalidRange, "tau must be > 0");
  if (init.dimension() != pool.dimension()) fail(ErrorCode::kDimensionMismatch, "surrogate vs pool dimension");
  const GroupPairRows full = group_pair_rows(pool);
  require_groups(full);

  const FeatureView x = FeatureView::of(pool);
  const double sign = direction == Direction::kMin ? 1.0 : -1.0;
  const std::vector<std::size_t> rows = s.rows();
  const std::vector<double> targets = s.scores();
  const std::size_t n = rows.size();

  Objective objective;
  objective.terms.emplace_back(SmoothDeltaAucTerm{
      subsample_pairs(pool, full, settings.objective_sample, settings.seed), settings.tau, sign});
  objective.terms.emplace_back(ScoreMatchTerm{});
  Objective fairness_only;
  fairness_only.terms.push_back(objective.terms[0]);
  auto& match = std::get<ScoreMatchTerm>(objective.terms[1]);
  match.tolerance = settings.lambda;

  Surrogate h = init;
  std::vector<double> nu(n, 0.0);
  double rho = settings.rho_init;
  Adam adam(h.params().size());
  std::mt19937_64 rng(splitmix64(settings.seed ^ (direction == Direction::kMax ? 0x6d6178ULL : 0x6d696eULL)));
  std::vector<std::size_t> order(n);
  const double tie = 0.1 * settings.lambda;

  auto snapshot = [&]() {
    Candidate c;
    c.params.assign(h.params().begin(), h.params().end());
    c.gap = std::max(0.0, feasibility_check(h, pool, s, settings.lambda));
    c.objective = evaluate_objective(h, x, fairness_only);
    return c;
  };
  Candidate best = snapshot();
  double prev_gap = best.gap;

  int t = 0;
  const int steps = std::max(1, settings.steps_per_epoch);
  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    for (int step = 0; step < steps; ++step, ++t) {
      match.rows.clear();
      match.targets.clear();
      match.multipliers.clear();
      if (n <= settings.batch || settings.batch == 0) {
        match.rows = rows;
        match.targets = targets;
        match.multipliers = nu;
      } else {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = 0; i < settings.batch; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, n - 1);
          std::swap(order[i], order[pick(rng)]);
          match.rows.push_back(rows[order[i]]);
          match.targets.push_back(targets[order[i]]);
          match.multipliers.push_back(nu[order[i]]);
        }
      }
      match.quadratic_weight = 0.5 * rho;
      const LossAndGrad lg = loss_and_grad(h, x, objective);
      const double lr = settings.learning_rate / std::sqrt(1.0 + static_cast<double>(t) / steps);
      adam.step(h.mutable_params(), lg.grad, lr, settings.box_bound);
    }
    // Dual ascent on every constraint, then adapt the penalty.
    std::vector<double> scores(n);
    h.forward_rows(x, rows, scores);
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::max(0.0, std::fabs(scores[i] - targets[i]) - settings.lambda);
      nu[i] += rho * v;
      gap = std::max(gap, v);
    }
    if (gap > 0.0 && gap > 0.9 * prev_gap) rho = std::min(2.0 * rho, settings.rho_max);
    prev_gap = gap;
    Candidate c = snapshot();
    if (better(c, best, tie)) best = std::move(c);
  }

  Surrogate out(h.architecture(), h.dimension(), std::move(best.params));
  const std::vector<double> pool_scores = out.forward_all(x);
  ExtremalResult result{out, smooth_delta_auc_scores(pool, pool_scores, settings.tau),
                        *group_auc_pool(pool, pool_scores).delta, best.gap};
  return result;
}

Surrogate fit_scores(const QueriedSet& s, const AuditPool& pool, Surrogate init, int steps, double learning_rate) {
  if (s.empty() || steps <= 0) return init;
  Objective objective;
  objective.terms.emplace_back(
      ScoreMatchTerm{s.rows(), s.scores(), 0.0, 1.0 / static_cast<double>(s.size()), {}});
  const FeatureView x = FeatureView::of(pool);
  Adam adam(init.params().size());
  for (int t = 0; t < steps; ++t) {
    const LossAndGrad lg = loss_and_grad(init, x, objective);
    adam.step(init.mutable_params(), lg.grad, learning_rate, 0.0);
  }
  return init;
}

CertificateRun certificate(const QueriedSet& s, const AuditPool& pool, const CermSettings& settings,
                           const ExtremalPair* warm, int round) {
  if (s.empty()) fail(ErrorCode::kPrecondition, "queried set is empty");
  // Cold solves also try a few raw seeded inits: the smooth objective is not
  // convex and a lone score-matching start can sit in the wrong basin.
  std::vector<Surrogate> starts_low, starts_high;
  if (warm) {
    starts_low.push_back(warm->low);
    starts_high.push_back(warm->high);
  } else {
    starts_low.push_back(fit_scores(s, pool, init_surrogate(pool.dimension(), settings.arch, settings.seed),
                                    settings.prefit_steps, settings.learning_rate));
    for (int i = 1; i <= settings.cold_starts; ++i) {
      starts_low.push_back(init_surrogate(pool.dimension(), settings.arch, splitmix64(settings.seed + i)));
    }
    starts_high = starts_low;
  }
  auto solve = [&](Direction d, const std::vector<Surrogate>* inits) {
    const double sign = d == Direction::kMin ? 1.0 : -1.0;
    const double tie = 0.1 * settings.lambda;
    std::optional<ExtremalResult> best;
    for (const Surrogate& init : *inits) {
      ExtremalResult r = solve_extremal(d, s, pool, settings, init);
      const bool take = !best || (r.gap <= tie && best->gap <= tie ? sign * r.mu_smooth < sign * best->mu_smooth
                                                                    : r.gap < best->gap);
      if (take) best.emplace(std::move(r));
    }
    return std::move(*best);
  };
  std::future<ExtremalResult> high_future;
  if (settings.parallel) {
    // The future's destructor joins the worker if the local solve throws.
    high_future = std::async(std::launch::async, solve, Direction::kMax, &starts_high);
  }
  ExtremalResult low = solve(Direction::kMin, &starts_low);
  ExtremalResult high = settings.parallel ? high_future.get() : solve(Direction::kMax, &starts_high);
  if (low.mu_exact > high.mu_exact) std::swap(low, high);

  Certificate c;
  c.mu_min = low.mu_exact;
  c.mu_max = high.mu_exact;
  c.midpoint = 0.5 * (c.mu_min + c.mu_max);
  c.width = c.mu_max - c.mu_min;
  c.gap_min = low.gap;
  c.gap_max = high.gap;
  c.smooth_min = low.mu_smooth;
  c.smooth_max = high.mu_smooth;
  c.round = round;
  return {c, ExtremalPair{low.h, high.h}};
}

}  // namespace activeaudit

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

#ifndef ACTIVEAUDIT_SELECTION_H_
#define ACTIVEAUDIT_SELECTION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "activeaudit/cerm.h"
#include "activeaudit/gp.h"
#include "activeaudit/metrics.h"
#include "activeaudit/pool.h"

namespace activeaudit {

// Unqueried pool rows, ascending.
std::vector<std::size_t> unqueried_rows(const AuditPool& pool, const QueriedSet& s);

// Uniform without replacement over unqueried ids.
std::vector<std::string> select_random(const AuditPool& pool, const QueriedSet& s, std::size_t k, std::uint64_t seed);

// Ceil-proportional quotas summing to n: ceil(n * size_i / total), then one
// is trimmed from each of the strata with the largest ceil excess until the
// total is n (ties trim the later stratum). Exact integer arithmetic.
std::vector<std::size_t> stratified_quotas(std::span<const std::size_t> sizes, std::size_t n);

// Quotas from full-pool strata, sampled within each stratum's unqueried
// members. Deficits of exhausted strata are reallocated with the same rule
// over the strata that still have room.
std::vector<std::string> select_stratified(const AuditPool& pool, const QueriedSet& s, std::size_t n, StratumKey key,
                                           std::uint64_t seed);

// Weighted sampling without replacement, weight (p (1 - p))^gamma. `p` is
// aligned with pool rows. Zero-weight rows are used only once the positive-
// weight ones run out (all zero: uniform).
std::vector<std::string> select_power(const AuditPool& pool, const QueriedSet& s, std::size_t k, double gamma,
                                      std::span<const double> p, std::uint64_t seed);

// |p_up - p_low| per candidate; kMissingScore if either map lacks one.
std::vector<double> score_disagreement(const ScoreMap& p_low, const ScoreMap& p_up,
                                       std::span<const std::string> candidates);

struct Schedule {
  int warmup_rounds = 0;
  int ramp_rounds = 0;
  double max_value = 0.0;

  // 0 before warmup; then max * min(1, (t - warmup + 1) / ramp).
  double value(int t) const;
};

struct BoCombined {
  std::vector<double> acq01;
  std::vector<double> combined;
  double mix_weight = 0.0;
};

// UCB acquisition (mean + beta * sd), z-scored across candidates, clipped to
// [-10, 10], squashed by the logistic, then mixed with `base`.
BoCombined bo_combine(std::span<const double> base, const GpModel& gp, const std::vector<std::vector<double>>& phi,
                      double beta, const Schedule& schedule, int t);

inline constexpr double kDivergenceFloor = 1e-6;

// w = 1 + alpha (clip(p_D / max(p_T, eps), 1/cap, cap) - 1), floored at
// 1/cap. Strata absent from S take the cap ratio.
std::map<Stratum, double> distribution_weights(const AuditPool& pool, const QueriedSet& s, double alpha, double cap,
                                               StratumKey key = StratumKey::kGroupAndLabel);

// Greedy MMR: each pick maximises score - gamma * max cosine to the picks so
// far. Ties go to the smaller id. Returns indices into `ids`.
std::vector<std::size_t> mmr_select(std::span<const std::string> ids, std::span<const double> scores,
                                    const std::vector<std::vector<double>>& phi, std::size_t k, double gamma);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// [dis, extras...] with non-finite entries replaced by 0.
std::vector<double> build_features(double dis, std::initializer_list<std::span<const double>> extras = {});

// Growing (phi, y) dataset for the BO acquisition. Targets are z-scored per
// fit and the lengthscale follows the median heuristic.
class BoDataset {
 public:
  void add(std::vector<double> phi, double y);
  std::size_t size() const { return phi_.size(); }
  // nullopt while empty.
  std::optional<GpModel> fit(KernelKind kind, double noise) const;

 private:
  std::vector<std::vector<double>> phi_;
  std::vector<double> y_;
};

// One row of the per-round diagnostics dump.
struct SelectionScore {
  std::string id;
  double base = 0.0;
  double acq01 = 0.0;
  double mix_weight = 0.0;
  double dist_weight = 1.0;
  double final_score = 0.0;
  bool selected = false;
};

// Columns: round,id,base,acq01,mix_weight,dist_weight,final,selected
std::string selection_scores_csv_header();
std::string selection_scores_csv_rows(int round, std::span<const SelectionScore> rows);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_SELECTION_H_

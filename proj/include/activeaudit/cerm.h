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

#ifndef ACTIVEAUDIT_CERM_H_
#define ACTIVEAUDIT_CERM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "activeaudit/pool.h"
#include "activeaudit/surrogate.h"

namespace activeaudit {

struct QueriedEntry {
  std::size_t row = 0;
  std::string id;
  double score = 0.0;
};

// Examples queried so far with their black-box scores, in query order.
class QueriedSet {
 public:
  void add(const AuditPool& pool, const std::string& id, double score);
  // Marks the end of a round (cut index = current size).
  void close_round() { cuts_.push_back(entries_.size()); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const std::string& id) const;
  const std::vector<QueriedEntry>& entries() const { return entries_; }
  const std::vector<std::size_t>& round_cuts() const { return cuts_; }
  std::vector<std::size_t> rows() const;
  std::vector<double> scores() const;

 private:
  std::vector<QueriedEntry> entries_;
  std::vector<std::size_t> cuts_;
  std::vector<char> seen_;  // by pool row
};

enum class Direction { kMin, kMax };

struct CermSettings {
  double lambda = 0.01;  // score-matching tolerance
  double tau = 0.05;     // smoothing temperature
  int epochs = 8;        // outer (dual) iterations
  int steps_per_epoch = 25;
  std::size_t batch = 512;  // constraint minibatch
  double learning_rate = 0.05;
  double rho_init = 10.0;
  double rho_max = 1e4;
  // Rows per group of the seeded pool subsample the smooth objective is
  // optimised on (0 = whole pool). Reported values always use the full pool.
  std::size_t objective_sample = 1024;
  double box_bound = 10.0;  // |theta_j| <= box_bound; 0 disables
  int prefit_steps = 150;   // score-match fit used when no warm start exists
  int cold_starts = 2;      // extra raw inits tried per direction without a warm start
  Architecture arch = Architecture::linear();
  std::uint64_t seed = 0;
  bool parallel = true;  // run both directions on separate threads
};

struct ExtremalResult {
  Surrogate h;
  double mu_smooth = 0.0;  // full pool, temperature tau
  double mu_exact = 0.0;   // full pool, exact AUC
  double gap = 0.0;        // max_i max(0, |h(x_i) - s_i| - lambda)
};

// Extremises the smooth pool Delta-AUC over {h : |h(x_i) - s_i| <= lambda}
// with an augmented Lagrangian. Returns the best hypothesis seen, ranked by
// feasibility gap first (gaps within lambda/10 tie) and objective second.
ExtremalResult solve_extremal(Direction direction, const QueriedSet& s, const AuditPool& pool,
                              const CermSettings& settings, const Surrogate& init);

struct Certificate {
  double mu_min = 0.0;
  double mu_max = 0.0;
  double midpoint = 0.0;
  double width = 0.0;
  double gap_min = 0.0;
  double gap_max = 0.0;
  double smooth_min = 0.0;
  double smooth_max = 0.0;
  int round = 0;

  bool operator==(const Certificate&) const = default;
};

struct ExtremalPair {
  Surrogate low;   // attains mu_min
  Surrogate high;  // attains mu_max
};

struct CertificateRun {
  Certificate cert;
  ExtremalPair extremal;
};

// Both solves; warm-started from `warm` when given, otherwise from a score-
// matching fit. mu_min/mu_max are exact pool Delta-AUCs of the two extremal
// hypotheses, ordered (swapped if the solves cross).
CertificateRun certificate(const QueriedSet& s, const AuditPool& pool, const CermSettings& settings,
                           const ExtremalPair* warm, int round = 0);

double feasibility_check(const Surrogate& h, const AuditPool& pool, const QueriedSet& s, double lambda);

// Least-squares score-matching fit on S, starting from `init`.
Surrogate fit_scores(const QueriedSet& s, const AuditPool& pool, Surrogate init, int steps, double learning_rate);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_CERM_H_

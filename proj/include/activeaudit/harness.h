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

#ifndef ACTIVEAUDIT_HARNESS_H_
#define ACTIVEAUDIT_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "activeaudit/blackbox.h"
#include "activeaudit/cerm.h"
#include "activeaudit/config.h"
#include "activeaudit/pool.h"

namespace activeaudit {

// Pool plus a factory for fresh scorers (one per run, so every run's query
// accounting starts at zero). `truth` is the exact pool Delta-AUC when the
// scorer exposes reference scores.
struct AuditContext {
  std::shared_ptr<const AuditPool> pool;
  std::function<std::unique_ptr<BlackBoxScorer>()> make_scorer;
  std::optional<double> truth;
};

// Builds the pool and scorer factory described by `config`.
AuditContext make_context(const AuditConfig& config);

struct RoundLog {
  int round = 0;
  std::size_t queries = 0;  // cumulative distinct queries, seed round included
  std::vector<std::string> batch_ids;
  std::optional<double> empirical_delta;  // plug-in Delta-AUC on S
  std::optional<Certificate> certificate;
  std::optional<double> estimate;  // midpoint (active) or plug-in (passive)
  std::optional<double> truth;
  std::optional<double> abs_error;  // present iff truth and estimate are

  bool operator==(const RoundLog& other) const;
};

struct AuditRun {
  Strategy strategy = Strategy::kRandom;
  std::uint64_t seed = 0;
  std::vector<RoundLog> rounds;
  std::vector<double> wall_seconds;  // per round, kept out of the logs
  std::size_t distinct_queries = 0;  // as counted by the scorer
  std::string diagnostics_csv;       // per-round selection scores when enabled
};

// The audit loop: stratified seed round (seed_multiplier per (g, y) stratum),
// then select/query/log until the budget is spent. The last batch is
// shortened so exactly `budget` queries are made (unless stopped early).
AuditRun run_audit(const AuditConfig& config, const AuditContext& context, std::uint64_t seed);

// Columns: round,queries,batch_ids,empirical_delta,mu_min,mu_max,midpoint,
// width,gap_min,gap_max,smooth_min,smooth_max,estimate,truth,abs_error
// Missing values are empty fields; batch ids are ';'-separated.
std::string round_log_csv(const std::vector<RoundLog>& rounds);
std::vector<RoundLog> parse_round_log_csv(const std::string& text);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_HARNESS_H_

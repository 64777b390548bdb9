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

#ifndef ACTIVEAUDIT_EXPERIMENT_H_
#define ACTIVEAUDIT_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "activeaudit/config.h"
#include "activeaudit/harness.h"
#include "activeaudit/metrics.h"

namespace activeaudit {

struct BudgetError {
  long long budget = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n - 1)
};

struct StrategySummary {
  Strategy strategy = Strategy::kRandom;
  std::size_t seeds = 0;
  ErrorCurve mean_curve;
  std::vector<double> epsilons;
  std::vector<std::optional<long long>> t_eps;  // aligned with epsilons; nullopt = not reached
  long long auec_t_max = 0;
  Auec auec;
  std::vector<BudgetError> budget_errors;
  // Certificate diagnostics over rounds after the seed round. A round counts
  // as covered when the truth lies in [mu_min, mu_max] and neither extremal
  // hypothesis misses the version space by more than lambda.
  std::size_t certified_rounds = 0;
  std::size_t infeasible_rounds = 0;
  std::optional<double> coverage;
  std::optional<double> mean_violation;
  std::optional<double> width_error_pearson;
  std::optional<double> width_error_spearman;
};

// Aggregates runs of one strategy. Curves without truth are skipped.
StrategySummary summarize_runs(const std::vector<AuditRun>& runs, const AuditConfig& config);

struct ExperimentResult {
  std::vector<StrategySummary> summaries;
  std::vector<std::vector<AuditRun>> runs;  // aligned with summaries
};

// Runs every (strategy, seed) pair; `config.jobs` seeds run concurrently.
ExperimentResult run_experiment(const AuditConfig& config, const AuditContext& context,
                                const std::vector<Strategy>& strategies, const std::vector<std::uint64_t>& seeds);

// "not reached" orders after every finite budget.
bool earlier(const std::optional<long long>& a, const std::optional<long long>& b);

std::string summary_csv(const std::vector<StrategySummary>& summaries);
// Tidy long format: strategy,seed,q,error,width
std::string plot_data_csv(const ExperimentResult& result);

// Writes summary.csv, logs/<strategy>_seed<seed>.csv, timing.csv and any
// selection diagnostics under `dir`.
void write_experiment(const ExperimentResult& result, const std::string& dir);
// Rebuilds the tidy plot data from the logs written by write_experiment.
std::string plot_data_from_dir(const std::string& dir);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_EXPERIMENT_H_

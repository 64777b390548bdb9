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

#ifndef ACTIVEAUDIT_CONFIG_H_
#define ACTIVEAUDIT_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "activeaudit/blackbox.h"
#include "activeaudit/cerm.h"
#include "activeaudit/gp.h"
#include "activeaudit/selection.h"
#include "activeaudit/synthetic.h"

namespace activeaudit {

enum class Strategy { kRandom, kStratified, kPower, kCermStratified, kBafaDisagreement, kBafaBo, kBoOnly };

std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view text);
// Strategies that compute a certificate every round.
bool uses_certificate(Strategy s);

// Where power sampling gets p(x) for unqueried points.
enum class PowerSource { kSurrogate, kOracle };

struct SelectionSettings {
  double beta = 2.0;       // UCB exploration
  double gamma_div = 0.2;  // MMR penalty
  double gamma_pow = 1.0;  // power-sampling exponent
  Schedule mix{3, 5, 0.5};
  Schedule alpha{1, 3, 2.0};
  double ratio_cap = 5.0;
  std::size_t candidates = 1000;  // M, 0 = every unqueried row
  bool bo_restrict_top = false;   // restrict BO to the top-disagreement quantile
  double bo_quantile = 0.5;
  KernelKind kernel = KernelKind::kMatern52;
  double gp_noise = 0.1;  // on z-scored targets
  PowerSource power_source = PowerSource::kSurrogate;
  bool write_diagnostics = false;
};

struct PoolSource {
  std::optional<std::string> path;         // csv / jsonl file
  std::optional<SyntheticSpec> synthetic;  // generated in memory
};

enum class ScorerKind { kSynthetic, kPlanted, kTable, kRemote };

struct ScorerSource {
  ScorerKind kind = ScorerKind::kSynthetic;  // kSynthetic pairs with a synthetic pool
  std::string path;                          // planted config json or score table csv
  std::string endpoint;
  RemoteOptions remote;
};

struct AuditConfig {
  PoolSource pool;
  ScorerSource scorer;
  Strategy strategy = Strategy::kBafaDisagreement;
  std::size_t budget = 600;  // T, counting the seed round
  std::size_t batch = 16;    // k
  std::size_t seed_multiplier = 1;
  CermSettings cerm;
  SelectionSettings selection;
  std::vector<double> epsilons{0.02, 0.05};
  std::vector<std::uint64_t> seeds{0};
  bool early_stop = false;
  double stop_epsilon = 0.02;  // stop once half-width <= this (early_stop only)
  std::size_t auec_t_max = 600;
  std::vector<std::size_t> report_budgets{100, 250, 500};
  std::size_t jobs = 1;  // concurrent seed runs
};

// Parses the JSON config document. Unknown keys and invalid values throw
// kConfigError naming the field.
AuditConfig parse_config(const std::string& json_text);
AuditConfig load_config(const std::string& path);
std::string config_to_json(const AuditConfig& config);
void validate(const AuditConfig& config);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_CONFIG_H_

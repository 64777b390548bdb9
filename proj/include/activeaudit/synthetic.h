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

#ifndef ACTIVEAUDIT_SYNTHETIC_H_
#define ACTIVEAUDIT_SYNTHETIC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "activeaudit/blackbox.h"
#include "activeaudit/pool.h"

namespace activeaudit {

// How the planted disparity reaches the scores.
//   kReflect: a seeded fraction of group-1 examples have their features
//     mirrored across the scorer's decision hyperplane; the scorer itself is
//     an uncorrupted sigmoid-linear model, so the linear surrogate family
//     contains it (the well-specified benchmark).
//   kScoreFlip: the scorer replaces s by 1 - s on those examples.
enum class BiasMode { kReflect, kScoreFlip };

std::string to_string(BiasMode mode);
BiasMode parse_bias_mode(std::string_view text);

struct SyntheticSpec {
  std::size_t n = 5000;
  std::size_t dimension = 32;
  double group_balance = 0.5;                // P(group = 1)
  std::array<double, 2> label_rates{0.3, 0.3};  // P(label = 1 | group)
  double separation = 1.0;                   // class means at +-separation along the scorer direction
  double weight_scale = 1.2;                 // |base_weights|
  double band_low = 0.10;
  double band_high = 0.18;
  BiasMode mode = BiasMode::kReflect;
  double noise_scale = 0.0;                  // logit noise of the scorer
  // Skips calibration and uses this group-1 flip probability directly.
  std::optional<double> forced_flip_prob;
  std::uint64_t seed = 0;
};

struct SyntheticBenchmark {
  AuditPool pool;
  PlantedBiasConfig scorer;
  double flip_prob = 0.0;  // calibrated group-1 corruption probability
  double delta_true = 0.0;  // exact pool Delta-AUC under full scoring
};

// Deterministic given spec.seed. Calibrates the group-1 corruption
// probability by bisection on [0, 0.5] so the exact pool Delta-AUC lands in
// [band_low, band_high]; kInfeasibleCalibration if it cannot.
SyntheticBenchmark generate_synthetic_pool(const SyntheticSpec& spec);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_SYNTHETIC_H_

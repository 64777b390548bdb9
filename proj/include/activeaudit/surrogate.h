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

#ifndef ACTIVEAUDIT_SURROGATE_H_
#define ACTIVEAUDIT_SURROGATE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "activeaudit/pool.h"

namespace activeaudit {

// Scores leave the sigmoid clamped to [kScoreFloor, 1 - kScoreFloor].
inline constexpr double kScoreFloor = 1e-7;

enum class ArchitectureKind { kLinear, kMlp };

struct Architecture {
  ArchitectureKind kind = ArchitectureKind::kLinear;
  std::size_t hidden_width = 0;  // mlp only
  bool bias = true;              // linear only; the mlp always has biases

  static Architecture linear(bool with_bias = true) { return {ArchitectureKind::kLinear, 0, with_bias}; }
  static Architecture mlp(std::size_t width) { return {ArchitectureKind::kMlp, width, true}; }
  bool operator==(const Architecture&) const = default;
};

// "linear", "linear_nobias", "mlp(8)".
std::string to_string(const Architecture& arch);
Architecture parse_architecture(std::string_view text);

// Row-major feature matrix borrowed from a pool (or a test fixture).
struct FeatureView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  static FeatureView of(const AuditPool& pool) {
    return {pool.feature_matrix().data(), pool.size(), pool.dimension()};
  }
  std::span<const double> row(std::size_t r) const { return {data + r * cols, cols}; }
};

// h_theta(x) = sigmoid(w.x + b)                      (linear)
// h_theta(x) = sigmoid(v.tanh(W x + c) + b)          (mlp, one hidden layer)
// Parameter layout: linear [w, b]; mlp [W (row-major, width x d), c, v, b].
class Surrogate {
 public:
  Surrogate(Architecture arch, std::size_t dimension, std::vector<double> params);

  static std::size_t parameter_count(const Architecture& arch, std::size_t dimension);

  const Architecture& architecture() const { return arch_; }
  std::size_t dimension() const { return dimension_; }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }

  double forward(std::span<const double> features) const;

  // Scores of the given rows; `pre` (optional) receives pre-activations.
  void forward_rows(const FeatureView& x, std::span<const std::size_t> rows, std::span<double> scores,
                    std::span<double> pre = {}) const;
  // Scores of every row of `x`.
  std::vector<double> forward_all(const FeatureView& x) const;

  // grad_params += sum_r grad_scores[r] * d h(x_rows[r]) / d theta.
  void backward_rows(const FeatureView& x, std::span<const std::size_t> rows,
                     std::span<const double> grad_scores, std::span<double> grad_params) const;

  // Snapshot: "arch,d,count" header line then one parameter per line.
  std::string serialize() const;
  static Surrogate deserialize(std::string_view text);

  bool operator==(const Surrogate&) const = default;

 private:
  double pre_activation(const double* x, double* hidden) const;

  Architecture arch_;
  std::size_t dimension_ = 0;
  std::vector<double> params_;
};

// Seeded initialisation: linear weights N(0,1)/sqrt(d) with zero bias; mlp
// input weights N(0,1)/sqrt(d), output weights N(0,1)/sqrt(width), zero biases.
Surrogate init_surrogate(std::size_t dimension, const Architecture& arch, std::uint64_t seed);

// ---- Objectives built from forward evaluations ----------------------------

// sum_r weights[r] * h(x_rows[r])
struct ScoreSumTerm {
  std::vector<std::size_t> rows;
  std::vector<double> weights;
};

// sum_r multipliers[r] * v_r + quadratic_weight * sum_r v_r^2 with
// v_r = max(0, |h(x_rows[r]) - targets[r]| - tolerance). An empty multiplier
// vector means all zero. tolerance 0 and quadratic_weight 1/n is plain MSE.
struct ScoreMatchTerm {
  std::vector<std::size_t> rows;
  std::vector<double> targets;
  double tolerance = 0.0;
  double quadratic_weight = 1.0;
  std::vector<double> multipliers;
};

// Within-group positive/negative rows for group 0 and group 1.
struct GroupPairRows {
  std::array<std::vector<std::size_t>, 2> pos;
  std::array<std::vector<std::size_t>, 2> neg;
};
GroupPairRows group_pair_rows(const AuditPool& pool, std::span<const std::size_t> rows);
GroupPairRows group_pair_rows(const AuditPool& pool);

// weight * (smoothAUC_0 - smoothAUC_1) with comparator sigmoid(diff / tau).
struct SmoothDeltaAucTerm {
  GroupPairRows pairs;
  double tau = 0.05;
  double weight = 1.0;
};

// weight * (AUC_0 - AUC_1), exact. Evaluation only: not differentiable.
struct ExactDeltaAucTerm {
  GroupPairRows pairs;
  double weight = 1.0;
};

using ObjectiveTerm = std::variant<ScoreSumTerm, ScoreMatchTerm, SmoothDeltaAucTerm, ExactDeltaAucTerm>;

struct Objective {
  std::vector<ObjectiveTerm> terms;
};

struct LossAndGrad {
  double value = 0.0;
  std::vector<double> grad;
};

// Exact analytic gradient of the composed objective. Throws
// kNonDifferentiableObjective if any term is an ExactDeltaAucTerm.
LossAndGrad loss_and_grad(const Surrogate& h, const FeatureView& x, const Objective& objective);
double evaluate_objective(const Surrogate& h, const FeatureView& x, const Objective& objective);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_SURROGATE_H_

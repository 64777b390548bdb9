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

#include "activeaudit/surrogate.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "activeaudit/csv.h"
#include "activeaudit/errors.h"
#include "activeaudit/ranking.h"
#include "activeaudit/simd/kernels.h"

namespace activeaudit {

std::string to_string(const Architecture& arch) {
  if (arch.kind == ArchitectureKind::kMlp) return "mlp(" + std::to_string(arch.hidden_width) + ")";
  return arch.bias ? "linear" : "linear_nobias";
}

Architecture parse_architecture(std::string_view text) {
  if (text == "linear") return Architecture::linear(true);
  if (text == "linear_nobias") return Architecture::linear(false);
  if (text.starts_with("mlp(") && text.ends_with(")")) {
    auto width = parse_int(text.substr(4, text.size() - 5));
    if (!width || *width < 1) fail(ErrorCode::kInvalidArchitecture, std::string(text));
    return Architecture::mlp(static_cast<std::size_t>(*width));
  }
  fail(ErrorCode::kInvalidArchitecture, std::string(text));
}

std::size_t Surrogate::parameter_count(const Architecture& arch, std::size_t dimension) {
  if (arch.kind == ArchitectureKind::kLinear) return dimension + (arch.bias ? 1 : 0);
  const std::size_t h = arch.hidden_width;
  return dimension * h + h + h + 1;
}

Surrogate::Surrogate(Architecture arch, std::size_t dimension, std::vector<double> params)
    : arch_(arch), dimension_(dimension), params_(std::move(params)) {
  if (dimension_ < 1) fail(ErrorCode::kInvalidArchitecture, "dimension must be >= 1");
  if (arch_.kind == ArchitectureKind::kMlp && arch_.hidden_width < 1) {
    fail(ErrorCode::kInvalidArchitecture, "mlp hidden width must be >= 1");
  }
  if (params_.size() != parameter_count(arch_, dimension_)) {
    fail(ErrorCode::kInvalidArchitecture,
         "expected " + std::to_string(parameter_count(arch_, dimension_)) + " parameters, got " +
             std::to_string(params_.size()));
  }
}

namespace {

inline double clamp_score(double s) { return std::clamp(s, kScoreFloor, 1.0 - kScoreFloor); }

// d clamp(sigmoid(z)) / dz; zero inside the clamped tails.
inline double score_slope(double z) {
  const double s = simd::sigmoid(z);
  if (s <= kScoreFloor || s >= 1.0 - kScoreFloor) return 0.0;
  const double e = std::exp(-std::fabs(z));
  return e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

double Surrogate::pre_activation(const double* x, double* hidden) const {
  const auto& k = simd::kernels();
  const std::size_t d = dimension_;
  if (arch_.kind == ArchitectureKind::kLinear) {
    return k.dot(params_.data(), x, d) + (arch_.bias ? params_[d] : 0.0);
  }
  const std::size_t h = arch_.hidden_width;
  const double* w = params_.data();
  const double* c = w + h * d;
  const double* v = c + h;
  const double b = v[h];
  double pre = b;
  for (std::size_t u = 0; u < h; ++u) {
    const double t = std::tanh(k.dot(w + u * d, x, d) + c[u]);
    if (hidden) hidden[u] = t;
    pre += v[u] * t;
  }
  return pre;
}

double Surrogate::forward(std::span<const double> features) const {
  if (features.size() != dimension_) {
    fail(ErrorCode::kDimensionMismatch,
         "expected " + std::to_string(dimension_) + ", got " + std::to_string(features.size()));
  }
  return clamp_score(simd::sigmoid(pre_activation(features.data(), nullptr)));
}

void Surrogate::forward_rows(const FeatureView& x, std::span<const std::size_t> rows,
                             std::span<double> scores, std::span<double> pre) const {
  if (x.cols != dimension_) fail(ErrorCode::kDimensionMismatch, "feature view width");
  std::vector<double> z(rows.size());
  if (arch_.kind == ArchitectureKind::kLinear) {
    simd::kernels().affine_rows(x.data, x.cols, rows.data(), rows.size(), params_.data(),
                                arch_.bias ? params_[dimension_] : 0.0, z.data());
  } else {
    for (std::size_t r = 0; r < rows.size(); ++r) z[r] = pre_activation(x.data + rows[r] * x.cols, nullptr);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    scores[r] = clamp_score(simd::sigmoid(z[r]));
    if (!pre.empty()) pre[r] = z[r];
  }
}

std::vector<double> Surrogate::forward_all(const FeatureView& x) const {
  std::vector<std::size_t> rows(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) rows[r] = r;
  std::vector<double> out(x.rows);
  forward_rows(x, rows, out);
  return out;
}

void Surrogate::backward_rows(const FeatureView& x, std::span<const std::size_t> rows,
                              std::span<const double> grad_scores, std::span<double> grad_params) const {
  if (x.cols != dimension_) fail(ErrorCode::kDimensionMismatch, "feature view width");
  const std::size_t d = dimension_;
  if (arch_.kind == ArchitectureKind::kLinear) {
    std::vector<double> z(rows.size());
    simd::kernels().affine_rows(x.data, x.cols, rows.data(), rows.size(), params_.data(),
                                arch_.bias ? params_[d] : 0.0, z.data());
    std::vector<double> coef(rows.size());
    double bias_grad = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      coef[r] = grad_scores[r] * score_slope(z[r]);
      bias_grad += coef[r];
    }
    simd::kernels().accumulate_rows(x.data, x.cols, rows.data(), rows.size(), coef.data(), grad_params.data());
    if (arch_.bias) grad_params[d] += bias_grad;
    return;
  }
  const std::size_t h = arch_.hidden_width;
  const double* v = params_.data() + h * d + h;
  double* gw = grad_params.data();
  double* gc = gw + h * d;
  double* gv = gc + h;
  double* gb = gv + h;
  std::vector<double> hidden(h);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double* xr = x.data + rows[r] * x.cols;
    const double z = pre_activation(xr, hidden.data());
    const double dz = grad_scores[r] * score_slope(z);
    if (dz == 0.0) continue;
    *gb += dz;
    for (std::size_t u = 0; u < h; ++u) {
      gv[u] += dz * hidden[u];
      const double da = dz * v[u] * (1.0 - hidden[u] * hidden[u]);
      gc[u] += da;
      double* gwu = gw + u * d;
      for (std::size_t c = 0; c < d; ++c) gwu[c] += da * xr[c];
    }
  }
}

std::string Surrogate::serialize() const {
  std::string out = to_string(arch_) + "," + std::to_string(dimension_) + "," + std::to_string(params_.size()) + "\n";
  for (double p : params_) out += format_double(p) + "\n";
  return out;
}

Surrogate Surrogate::deserialize(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (lines.empty()) fail(ErrorCode::kParseError, "empty surrogate snapshot");
  auto header = csv_split(lines[0]);
  if (!header || header->size() != 3) fail(ErrorCode::kParseError, "surrogate header");
  const Architecture arch = parse_architecture((*header)[0]);
  auto d = parse_int((*header)[1]);
  auto count = parse_int((*header)[2]);
  if (!d || !count || *d < 1) fail(ErrorCode::kParseError, "surrogate header");
  std::vector<double> params;
  for (std::size_t i = 1; i < lines.size() && params.size() < static_cast<std::size_t>(*count); ++i) {
    if (lines[i].empty()) continue;
    auto v = parse_double(lines[i]);
    if (!v) fail(ErrorCode::kParseError, "surrogate parameter line " + std::to_string(i + 1));
    params.push_back(*v);
  }
  return Surrogate(arch, static_cast<std::size_t>(*d), std::move(params));
}

Surrogate init_surrogate(std::size_t dimension, const Architecture& arch, std::uint64_t seed) {
  if (dimension < 1) fail(ErrorCode::kInvalidArchitecture, "dimension must be >= 1");
  if (arch.kind == ArchitectureKind::kMlp && arch.hidden_width < 1) {
    fail(ErrorCode::kInvalidArchitecture, "mlp hidden width must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> params(Surrogate::parameter_count(arch, dimension), 0.0);
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(dimension));
  if (arch.kind == ArchitectureKind::kLinear) {
    for (std::size_t i = 0; i < dimension; ++i) params[i] = normal(rng) * in_scale;
  } else {
    const std::size_t h = arch.hidden_width;
    for (std::size_t i = 0; i < h * dimension; ++i) params[i] = normal(rng) * in_scale;
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t u = 0; u < h; ++u) params[h * dimension + h + u] = normal(rng) * out_scale;
  }
  return Surrogate(arch, dimension, std::move(params));
}

// ---- Objectives -------------------------------------------------------------

GroupPairRows group_pair_rows(const AuditPool& pool, std::span<const std::size_t> rows) {
  GroupPairRows out;
  for (std::size_t r : rows) {
    const AuditExample& ex = pool.at(r);
    (ex.label == 1 ? out.pos : out.neg)[ex.group].push_back(r);
  }
  return out;
}

GroupPairRows group_pair_rows(const AuditPool& pool) {
  std::vector<std::size_t> rows(pool.size());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  return group_pair_rows(pool, rows);
}

namespace {

void require_pairs(const GroupPairRows& pairs) {
  for (int g = 0; g < 2; ++g) {
    if (pairs.pos[g].empty() || pairs.neg[g].empty()) {
      fail(ErrorCode::kDegenerateGroup, "group " + std::to_string(g));
    }
  }
}

// Adds the term's value; if grad is non-empty, adds its parameter gradient.
double apply_term(const Surrogate& h, const FeatureView& x, const ObjectiveTerm& term, std::span<double> grad) {
  const bool want_grad = !grad.empty();
  return std::visit(
      [&](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ScoreSumTerm>) {
          std::vector<double> s(t.rows.size());
          h.forward_rows(x, t.rows, s);
          double value = 0.0;
          for (std::size_t r = 0; r < s.size(); ++r) value += t.weights[r] * s[r];
          if (want_grad) h.backward_rows(x, t.rows, t.weights, grad);
          return value;
        } else if constexpr (std::is_same_v<T, ScoreMatchTerm>) {
          std::vector<double> s(t.rows.size());
          h.forward_rows(x, t.rows, s);
          std::vector<double> gs(t.rows.size(), 0.0);
          double value = 0.0;
          for (std::size_t r = 0; r < s.size(); ++r) {
            const double diff = s[r] - t.targets[r];
            const double v = std::max(0.0, std::fabs(diff) - t.tolerance);
            if (v <= 0.0) continue;
            const double nu = t.multipliers.empty() ? 0.0 : t.multipliers[r];
            value += nu * v + t.quadratic_weight * v * v;
            gs[r] = (nu + 2.0 * t.quadratic_weight * v) * (diff > 0.0 ? 1.0 : -1.0);
          }
          if (want_grad) h.backward_rows(x, t.rows, gs, grad);
          return value;
        } else if constexpr (std::is_same_v<T, SmoothDeltaAucTerm>) {
          require_pairs(t.pairs);
          double value = 0.0;
          for (int g = 0; g < 2; ++g) {
            const auto& pr = t.pairs.pos[g];
            const auto& nr = t.pairs.neg[g];
            std::vector<double> ps(pr.size()), ns(nr.size());
            h.forward_rows(x, pr, ps);
            h.forward_rows(x, nr, ns);
            const double sign = (g == 0 ? 1.0 : -1.0) * t.weight;
            if (want_grad) {
              std::vector<double> gp(pr.size()), gn(nr.size());
              value += sign * smooth_auc(ps, ns, t.tau, gp, gn);
              for (double& v : gp) v *= sign;
              for (double& v : gn) v *= sign;
              h.backward_rows(x, pr, gp, grad);
              h.backward_rows(x, nr, gn, grad);
            } else {
              value += sign * smooth_auc(ps, ns, t.tau);
            }
          }
          return value;
        } else {
          if (want_grad) fail(ErrorCode::kNonDifferentiableObjective, "exact AUC term has no gradient");
          require_pairs(t.pairs);
          double value = 0.0;
          for (int g = 0; g < 2; ++g) {
            std::vector<double> ps(t.pairs.pos[g].size()), ns(t.pairs.neg[g].size());
            h.forward_rows(x, t.pairs.pos[g], ps);
            h.forward_rows(x, t.pairs.neg[g], ns);
            value += (g == 0 ? 1.0 : -1.0) * t.weight * *exact_auc(ps, ns);
          }
          return value;
        }
      },
      term);
}

}  // namespace

LossAndGrad loss_and_grad(const Surrogate& h, const FeatureView& x, const Objective& objective) {
  for (const auto& term : objective.terms) {
    if (std::holds_alternative<ExactDeltaAucTerm>(term)) {
      fail(ErrorCode::kNonDifferentiableObjective, "exact AUC term has no gradient");
    }
  }
  LossAndGrad out;
  out.grad.assign(h.params().size(), 0.0);
  for (const auto& term : objective.terms) out.value += apply_term(h, x, term, out.grad);
  for (double g : out.grad) {
    if (!std::isfinite(g)) fail(ErrorCode::kNonDifferentiableObjective, "non-finite gradient");
  }
  return out;
}

double evaluate_objective(const Surrogate& h, const FeatureView& x, const Objective& objective) {
  double value = 0.0;
  for (const auto& term : objective.terms) value += apply_term(h, x, term, {});
  return value;
}

}  // namespace activeaudit

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

#include "activeaudit/synthetic.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "activeaudit/errors.h"
#include "activeaudit/hashing.h"
#include "activeaudit/metrics.h"
#include "activeaudit/simd/kernels.h"

namespace activeaudit {

namespace {

constexpr std::uint64_t kFlipStream = 0x666c6970ULL;  // shared with the planted-bias scorer
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

std::string example_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "x%06zu", i);
  return buf;
}

}  // namespace

std::string to_string(BiasMode mode) { return mode == BiasMode::kReflect ? "reflect" : "score_flip"; }

BiasMode parse_bias_mode(std::string_view text) {
  if (text == "reflect") return BiasMode::kReflect;
  if (text == "score_flip") return BiasMode::kScoreFlip;
  fail(ErrorCode::kConfigError, "unknown bias mode: " + std::string(text));
}

SyntheticBenchmark generate_synthetic_pool(const SyntheticSpec& spec) {
  if (spec.n < 4 || spec.dimension < 1) fail(ErrorCode::kPrecondition, "need n >= 4 and d >= 1");
  for (double p : {spec.group_balance, spec.label_rates[0], spec.label_rates[1]}) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::kInvalidProbability, "group balance and label rates must be in (0,1)");
  }
  if (spec.band_low > spec.band_high) fail(ErrorCode::kInvalidRange, "band_low > band_high");

  const std::size_t d = spec.dimension;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Scorer direction: a seeded unit vector.
  std::vector<double> u(d);
  double norm = 0.0;
  for (double& v : u) {
    v = normal(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : u) v /= norm;

  struct Raw {
    std::string id;
    int group, label;
    std::vector<double> x;
    double logit;  // w . x
  };
  std::vector<Raw> raw(spec.n);
  std::array<std::size_t, 4> cells{};
  for (std::size_t i = 0; i < spec.n; ++i) {
    Raw& r = raw[i];
    r.id = example_id(i);
    r.group = unit(rng) < spec.group_balance ? 1 : 0;
    r.label = unit(rng) < spec.label_rates[r.group] ? 1 : 0;
    r.x.resize(d);
    const double shift = (r.label == 1 ? 1.0 : -1.0) * spec.separation;
    r.logit = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      r.x[c] = shift * u[c] + normal(rng);
      r.logit += spec.weight_scale * u[c] * r.x[c];
    }
    ++cells[2 * r.group + r.label];
  }
  for (std::size_t c : cells) {
    if (c == 0) fail(ErrorCode::kPrecondition, "a (group, label) stratum is empty; increase n");
  }

  std::vector<double> flip_u(spec.n), eta(spec.n, 0.0);
  for (std::size_t i = 0; i < spec.n; ++i) {
    flip_u[i] = hash_uniform(spec.seed, kFlipStream, raw[i].id);
    if (spec.noise_scale > 0.0) eta[i] = spec.noise_scale * hash_gaussian(spec.seed, kNoiseStream, raw[i].id);
  }
  auto flipped = [&](std::size_t i, double p) { return raw[i].group == 1 && p > 0.0 && flip_u[i] < p; };

  // Pool scores at corruption probability p, mirroring both modes exactly.
  auto scores_at = [&](double p) {
    std::vector<double> s(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
      const bool f = flipped(i, p);
      if (spec.mode == BiasMode::kReflect) {
        s[i] = simd::sigmoid((f ? -raw[i].logit : raw[i].logit) + eta[i]);
      } else {
        const double clean = simd::sigmoid(raw[i].logit + eta[i]);
        s[i] = f ? 1.0 - clean : clean;
      }
    }
    return s;
  };

  std::vector<AuditExample> skeleton;
  skeleton.reserve(spec.n);
  for (const Raw& r : raw) skeleton.push_back({r.id, r.x, r.group, r.label, std::nullopt});
  const AuditPool plain = AuditPool::from_examples(skeleton);
  auto exact_delta = [&](double p) {
    const auto d_opt = group_auc_pool(plain, scores_at(p)).delta;
    return *d_opt;
  };

  double p = 0.0;
  double delta = 0.0;
  if (spec.forced_flip_prob) {
    p = *spec.forced_flip_prob;
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidProbability, "forced flip probability");
    delta = exact_delta(p);
  } else {
    double lo = 0.0, hi = 0.5;
    const double d_lo = exact_delta(lo);
    const double d_hi = exact_delta(hi);
    auto in_band = [&](double v) { return v >= spec.band_low && v <= spec.band_high; };
    if (in_band(d_lo)) {
      p = lo;
      delta = d_lo;
    } else if (d_lo > spec.band_high || d_hi < spec.band_low) {
      fail(ErrorCode::kInfeasibleCalibration, "band [" + std::to_string(spec.band_low) + ", " +
                                                  std::to_string(spec.band_high) + "] outside reachable range [" +
                                                  std::to_string(d_lo) + ", " + std::to_string(d_hi) + "]");
    } else {
      const double target = 0.5 * (spec.band_low + spec.band_high);
      bool found = false;
      for (int it = 0; it < 60 && !found; ++it) {
        p = 0.5 * (lo + hi);
        delta = exact_delta(p);
        if (in_band(delta) && std::fabs(delta - target) <= 0.25 * (spec.band_high - spec.band_low)) found = true;
        else if (delta < target) lo = p;
        else hi = p;
      }
      if (!in_band(delta)) fail(ErrorCode::kInfeasibleCalibration, "bisection did not reach the band");
    }
  }

  // Materialise the pool and the paired scorer config.
  std::vector<double> w(d);
  for (std::size_t c = 0; c < d; ++c) w[c] = spec.weight_scale * u[c];
  std::vector<AuditExample> examples = std::move(skeleton);
  if (spec.mode == BiasMode::kReflect) {
    double ww = 0.0;
    for (double v : w) ww += v * v;
    for (std::size_t i = 0; i < spec.n; ++i) {
      if (!flipped(i, p)) continue;
      const double coef = 2.0 * raw[i].logit / ww;
      for (std::size_t c = 0; c < d; ++c) examples[i].features[c] -= coef * w[c];
    }
  }
  SyntheticBenchmark out{AuditPool::from_examples(std::move(examples)), PlantedBiasConfig{}, p, 0.0};
  out.scorer.base_weights = w;
  out.scorer.bias = 0.0;
  out.scorer.flip_prob_group0 = 0.0;
  out.scorer.flip_prob_group1 = spec.mode == BiasMode::kScoreFlip ? p : 0.0;
  out.scorer.noise_scale = spec.noise_scale;
  out.scorer.seed = spec.seed;
  // Truth from the scorer itself so reflected features round exactly as scored.
  PlantedBiasScorer scorer(out.scorer);
  out.delta_true = *group_auc_pool(out.pool, *scorer.reference_scores(out.pool)).delta;
  (void)delta;
  return out;
}

}  // namespace activeaudit

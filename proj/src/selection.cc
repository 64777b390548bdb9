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

#include "activeaudit/selection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "activeaudit/csv.h"
#include "activeaudit/errors.h"

namespace activeaudit {

std::vector<std::size_t> unqueried_rows(const AuditPool& pool, const QueriedSet& s) {
  std::vector<char> queried(pool.size(), 0);
  for (const auto& e : s.entries()) queried[e.row] = 1;
  std::vector<std::size_t> out;
  out.reserve(pool.size() - s.size());
  for (std::size_t r = 0; r < pool.size(); ++r) {
    if (!queried[r]) out.push_back(r);
  }
  return out;
}

namespace {

void require_available(std::size_t available, std::size_t k) {
  if (available < k) {
    fail(ErrorCode::kPoolExhausted,
         "requested " + std::to_string(k) + ", only " + std::to_string(available) + " unqueried");
  }
}

// First k entries of a seeded partial Fisher-Yates shuffle.
std::vector<std::size_t> partial_shuffle(std::vector<std::size_t> items, std::size_t k, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
    std::swap(items[i], items[pick(rng)]);
  }
  items.resize(k);
  return items;
}

std::vector<std::string> ids_of(const AuditPool& pool, std::span<const std::size_t> rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(pool.at(r).id);
  return out;
}

}  // namespace

std::vector<std::string> select_random(const AuditPool& pool, const QueriedSet& s, std::size_t k, std::uint64_t seed) {
  auto rows = unqueried_rows(pool, s);
  require_available(rows.size(), k);
  std::mt19937_64 rng(seed);
  return ids_of(pool, partial_shuffle(std::move(rows), k, rng));
}

std::vector<std::size_t> stratified_quotas(std::span<const std::size_t> sizes, std::size_t n) {
  using u128 = unsigned __int128;
  const u128 total = std::accumulate(sizes.begin(), sizes.end(), u128{0});
  std::vector<std::size_t> q(sizes.size(), 0);
  if (total == 0) {
    if (n != 0) fail(ErrorCode::kPrecondition, "all strata are empty");
    return q;
  }
  std::size_t sum = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    q[i] = static_cast<std::size_t>((u128{n} * sizes[i] + total - 1) / total);
    sum += q[i];
  }
  // Excess of stratum i in units of 1/total: q_i * total - n * size_i.
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const u128 ea = u128{q[a]} * total - u128{n} * sizes[a];
    const u128 eb = u128{q[b]} * total - u128{n} * sizes[b];
    if (ea != eb) return ea > eb;
    return a > b;
  });
  for (std::size_t j = 0; sum > n; ++j) {
    --q[order[j]];
    --sum;
  }
  return q;
}

std::vector<std::string> select_stratified(const AuditPool& pool, const QueriedSet& s, std::size_t n, StratumKey key,
                                           std::uint64_t seed) {
  std::vector<Stratum> strata;
  for (const auto& [st, ids] : pool.strata_index()) {
    Stratum k = key == StratumKey::kGroup ? Stratum{st.group, -1} : st;
    if (strata.empty() || strata.back() != k) strata.push_back(k);
  }
  std::vector<char> queried(pool.size(), 0);
  for (const auto& e : s.entries()) queried[e.row] = 1;

  std::vector<std::size_t> sizes;
  std::vector<std::vector<std::size_t>> avail;
  std::size_t total_avail = 0;
  for (const Stratum& st : strata) {
    const auto rows = pool.stratum_rows(st);
    sizes.push_back(rows.size());
    std::vector<std::size_t> a;
    for (std::size_t r : rows) {
      if (!queried[r]) a.push_back(r);
    }
    total_avail += a.size();
    avail.push_back(std::move(a));
  }
  require_available(total_avail, n);

  const auto quota = stratified_quotas(sizes, n);
  std::vector<std::size_t> alloc(strata.size());
  std::size_t placed = 0;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    alloc[i] = std::min(quota[i], avail[i].size());
    placed += alloc[i];
  }
  while (placed < n) {
    std::vector<std::size_t> weights(strata.size(), 0);
    for (std::size_t i = 0; i < strata.size(); ++i) {
      if (alloc[i] < avail[i].size()) weights[i] = std::max<std::size_t>(sizes[i], 1);
    }
    const auto extra = stratified_quotas(weights, n - placed);
    for (std::size_t i = 0; i < strata.size(); ++i) {
      const std::size_t add = std::min(extra[i], avail[i].size() - alloc[i]);
      alloc[i] += add;
      placed += add;
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < strata.size(); ++i) {
    if (alloc[i] == 0) continue;
    for (auto& id : ids_of(pool, partial_shuffle(avail[i], alloc[i], rng))) out.push_back(std::move(id));
  }
  return out;
}

std::vector<std::string> select_power(const AuditPool& pool, const QueriedSet& s, std::size_t k, double gamma,
                                      std::span<const double> p, std::uint64_t seed) {
  if (!(gamma >= 0.0)) fail(ErrorCode::kInvalidRange, "gamma_pow must be >= 0");
  if (p.size() != pool.size()) fail(ErrorCode::kDimensionMismatch, "power scores must align with pool rows");
  auto rows = unqueried_rows(pool, s);
  require_available(rows.size(), k);
  std::vector<double> w(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double q = p[rows[i]];
    const double base = std::isfinite(q) ? std::clamp(q * (1.0 - q), 0.0, 0.25) : 0.0;
    w[i] = std::pow(base, gamma);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> picked;
  picked.reserve(k);
  std::vector<char> taken(rows.size(), 0);
  while (picked.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!taken[i]) total += w[i];
    }
    std::size_t choice = rows.size();
    if (total > 0.0) {
      const double u = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (taken[i] || w[i] <= 0.0) continue;
        choice = i;
        acc += w[i];
        if (u < acc) break;
      }
    } else {
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!taken[i]) rest.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> pick(0, rest.size() - 1);
      choice = rest[pick(rng)];
    }
    taken[choice] = 1;
    picked.push_back(rows[choice]);
  }
  return ids_of(pool, picked);
}

std::vector<double> score_disagreement(const ScoreMap& p_low, const ScoreMap& p_up,
                                       std::span<const std::string> candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& id : candidates) {
    auto lo = p_low.find(id);
    auto hi = p_up.find(id);
    if (lo == p_low.end() || hi == p_up.end()) fail(ErrorCode::kMissingScore, id);
    out.push_back(std::fabs(hi->second - lo->second));
  }
  return out;
}

double Schedule::value(int t) const {
  if (t < warmup_rounds) return 0.0;
  if (ramp_rounds <= 0) return max_value;
  const double frac = static_cast<double>(t - warmup_rounds + 1) / static_cast<double>(ramp_rounds);
  return max_value * std::min(1.0, frac);
}

BoCombined bo_combine(std::span<const double> base, const GpModel& gp, const std::vector<std::vector<double>>& phi,
                      double beta, const Schedule& schedule, int t) {
  if (gp.size() == 0) fail(ErrorCode::kUnfittedGp, "bo_combine needs a fitted GP");
  if (phi.size() != base.size()) fail(ErrorCode::kDimensionMismatch, "features vs base scores");
  const GpPrediction pred = gp_predict(gp, phi);
  const std::size_t n = base.size();
  std::vector<double> acq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = pred.mean[i] + beta * std::sqrt(pred.variance[i]);
    acq[i] = std::isfinite(a) ? a : 0.0;
  }
  BoCombined out;
  out.mix_weight = schedule.value(t);
  out.acq01.assign(n, 0.5);
  if (n > 0 && *std::max_element(acq.begin(), acq.end()) != *std::min_element(acq.begin(), acq.end())) {
    const double m = mean(acq);
    double var = 0.0;
    for (double a : acq) var += (a - m) * (a - m);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = std::clamp((acq[i] - m) / (sd + 1e-8), -10.0, 10.0);
      out.acq01[i] = 1.0 / (1.0 + std::exp(-z));
    }
  }
  out.combined.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.combined[i] = (1.0 - out.mix_weight) * base[i] + out.mix_weight * out.acq01[i];
  }
  return out;
}

std::map<Stratum, double> distribution_weights(const AuditPool& pool, const QueriedSet& s, double alpha, double cap,
                                               StratumKey key) {
  if (!(alpha >= 0.0)) fail(ErrorCode::kInvalidRange, "alpha must be >= 0");
  if (!(cap >= 1.0)) fail(ErrorCode::kInvalidRange, "cap must be >= 1");
  const auto p_d = stratum_proportions(pool, key);
  std::map<Stratum, std::size_t> counts;
  for (const auto& e : s.entries()) ++counts[pool.stratum_of(e.row, key)];
  std::map<Stratum, double> out;
  for (const auto& [st, pd] : p_d) {
    double ratio = cap;
    if (auto it = counts.find(st); it != counts.end() && !s.empty()) {
      const double pt = static_cast<double>(it->second) / static_cast<double>(s.size());
      ratio = std::clamp(pd / std::max(pt, kDivergenceFloor), 1.0 / cap, cap);
    }
    out[st] = std::max(1.0 / cap, 1.0 + alpha * (ratio - 1.0));
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

std::vector<std::size_t> mmr_select(std::span<const std::string> ids, std::span<const double> scores,
                                    const std::vector<std::vector<double>>& phi, std::size_t k, double gamma) {
  const std::size_t n = ids.size();
  if (scores.size() != n || phi.size() != n) fail(ErrorCode::kDimensionMismatch, "mmr inputs");
  if (k < 1) fail(ErrorCode::kPrecondition, "k must be >= 1");
  require_available(n, k);
  std::vector<double> max_sim(n, -std::numeric_limits<double>::infinity());
  std::vector<char> taken(n, 0);
  std::vector<std::size_t> out;
  out.reserve(k);
  while (out.size() < k) {
    std::size_t best = n;
    double best_value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double v = scores[i] - (out.empty() ? 0.0 : gamma * max_sim[i]);
      if (best == n || v > best_value || (v == best_value && ids[i] < ids[best])) {
        best = i;
        best_value = v;
      }
    }
    taken[best] = 1;
    out.push_back(best);
    if (gamma != 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i]) max_sim[i] = std::max(max_sim[i], cosine_similarity(phi[i], phi[best]));
      }
    }
  }
  return out;
}

std::vector<double> build_features(double dis, std::initializer_list<std::span<const double>> extras) {
  std::vector<double> out{std::isfinite(dis) ? dis : 0.0};
  for (const auto& e : extras) {
    for (double v : e) out.push_back(std::isfinite(v) ? v : 0.0);
  }
  return out;
}

void BoDataset::add(std::vector<double> phi, double y) {
  for (double& v : phi) {
    if (!std::isfinite(v)) v = 0.0;
  }
  phi_.push_back(std::move(phi));
  y_.push_back(std::isfinite(y) ? y : 0.0);
}

std::optional<GpModel> BoDataset::fit(KernelKind kind, double noise) const {
  if (phi_.empty()) return std::nullopt;
  const double m = mean(y_);
  double var = 0.0;
  for (double v : y_) var += (v - m) * (v - m);
  double sd = std::sqrt(var / static_cast<double>(y_.size()));
  if (!(sd > 1e-12)) sd = 1.0;
  std::vector<double> z(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) z[i] = (y_[i] - m) / sd;
  KernelParams params{kind, median_heuristic(phi_), 1.0};
  return fit_gp(phi_, std::move(z), params, noise);
}

std::string selection_scores_csv_header() { return "round,id,base,acq01,mix_weight,dist_weight,final,selected\n"; }

std::string selection_scores_csv_rows(int round, std::span<const SelectionScore> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += csv_join({std::to_string(round), r.id, format_double(r.base), format_double(r.acq01),
                     format_double(r.mix_weight), format_double(r.dist_weight), format_double(r.final_score),
                     r.selected ? "1" : "0"});
    out += "\n";
  }
  return out;
}

}  // namespace activeaudit

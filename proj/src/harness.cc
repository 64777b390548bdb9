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

#include "activeaudit/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "activeaudit/csv.h"
#include "activeaudit/errors.h"
#include "activeaudit/hashing.h"
#include "activeaudit/metrics.h"
#include "activeaudit/selection.h"
#include "activeaudit/synthetic.h"

namespace activeaudit {

bool RoundLog::operator==(const RoundLog& o) const {
  return round == o.round && queries == o.queries && batch_ids == o.batch_ids &&
         empirical_delta == o.empirical_delta && certificate == o.certificate && estimate == o.estimate &&
         truth == o.truth && abs_error == o.abs_error;
}

AuditContext make_context(const AuditConfig& config) {
  AuditContext ctx;
  if (config.pool.synthetic) {
    SyntheticBenchmark bench = generate_synthetic_pool(*config.pool.synthetic);
    ctx.pool = std::make_shared<const AuditPool>(std::move(bench.pool));
    if (config.scorer.kind == ScorerKind::kSynthetic) {
      const PlantedBiasConfig scorer = bench.scorer;
      ctx.make_scorer = [scorer] { return std::unique_ptr<BlackBoxScorer>(make_planted_bias_scorer(scorer)); };
    }
  } else {
    const std::string& path = *config.pool.path;
    ctx.pool = std::make_shared<const AuditPool>(load_pool(path, pool_format_from_path(path)));
  }
  const std::size_t dim = ctx.pool->dimension();
  switch (config.scorer.kind) {
    case ScorerKind::kSynthetic:
      break;
    case ScorerKind::kPlanted: {
      std::string text;
      for (const auto& line : read_lines(config.scorer.path)) text += line + "\n";
      const PlantedBiasConfig scorer = planted_bias_from_json(text);
      ctx.make_scorer = [scorer] { return std::unique_ptr<BlackBoxScorer>(make_planted_bias_scorer(scorer)); };
      break;
    }
    case ScorerKind::kTable: {
      const std::string path = config.scorer.path;
      TableScorer::from_csv(path);  // fail early on a bad file
      ctx.make_scorer = [path] { return std::unique_ptr<BlackBoxScorer>(TableScorer::from_csv(path)); };
      break;
    }
    case ScorerKind::kRemote: {
      const std::string endpoint = config.scorer.endpoint;
      const RemoteOptions options = config.scorer.remote;
      ctx.make_scorer = [endpoint, options, dim] {
        return std::unique_ptr<BlackBoxScorer>(std::make_unique<RemoteScorer>(endpoint, options, dim));
      };
      break;
    }
  }
  if (auto ref = ctx.make_scorer()->reference_scores(*ctx.pool)) {
    ctx.truth = group_auc_pool(*ctx.pool, *ref).delta;
  }
  return ctx;
}

namespace {

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(tag + 0x5eed));
}

std::vector<double> scores_of_rows(const Surrogate& h, const AuditPool& pool, std::span<const std::size_t> rows) {
  std::vector<double> out(rows.size());
  h.forward_rows(FeatureView::of(pool), rows, out);
  return out;
}

// [g, x...] with the same sanitising as build_features.
std::vector<double> context_features(const AuditPool& pool, std::size_t row) {
  std::vector<double> out;
  out.reserve(pool.dimension() + 1);
  out.push_back(static_cast<double>(pool.at(row).group));
  for (double v : pool.features(row)) out.push_back(std::isfinite(v) ? v : 0.0);
  return out;
}

class AuditLoop {
 public:
  AuditLoop(const AuditConfig& config, const AuditContext& ctx, std::uint64_t seed)
      : config_(config), pool_(*ctx.pool), truth_(ctx.truth), scorer_(ctx.make_scorer()), seed_(seed) {
    run_.strategy = config.strategy;
    run_.seed = seed;
    cerm_ = config.cerm;
    cerm_.seed = derive(seed, 2);
    if (config.selection.write_diagnostics) run_.diagnostics_csv = selection_scores_csv_header();
  }

  AuditRun run() {
    auto start = std::chrono::steady_clock::now();
    query(seed_round_ids());
    const std::size_t budget = config_.budget;
    for (int t = 0;; ++t) {
      log_round(t);
      const auto now = std::chrono::steady_clock::now();
      run_.wall_seconds.push_back(std::chrono::duration<double>(now - start).count());
      start = now;
      if (s_.size() >= budget) break;
      const auto& cert = run_.rounds.back().certificate;
      if (config_.early_stop && cert && 0.5 * cert->width <= config_.stop_epsilon) break;
      const std::size_t remaining = pool_.size() - s_.size();
      if (remaining == 0) break;
      const std::size_t k = std::min({config_.batch, budget - s_.size(), remaining});
      query(select(t, k));
    }
    run_.distinct_queries = scorer_->distinct_queries();
    if (run_.distinct_queries != s_.size()) {
      fail(ErrorCode::kPrecondition, "query accounting mismatch: scorer saw " +
                                         std::to_string(run_.distinct_queries) + ", loop recorded " +
                                         std::to_string(s_.size()));
    }
    return std::move(run_);
  }

 private:
  std::vector<std::string> seed_round_ids() {
    std::mt19937_64 rng(derive(seed_, 1));
    std::vector<std::string> ids;
    for (const auto& [stratum, members] : pool_.strata_index()) {
      std::vector<std::string> m = members;
      const std::size_t take = std::min(config_.seed_multiplier, m.size());
      for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, m.size() - 1);
        std::swap(m[i], m[pick(rng)]);
        ids.push_back(m[i]);
      }
    }
    return ids;
  }

  void query(const std::vector<std::string>& ids) {
    std::vector<const AuditExample*> batch;
    batch.reserve(ids.size());
    for (const auto& id : ids) {
      if (s_.contains(id)) fail(ErrorCode::kPrecondition, "strategy re-selected " + id);
      batch.push_back(&pool_.at(pool_.require_row(id)));
    }
    const auto records = scorer_->score_batch(std::span<const AuditExample* const>(batch));
    for (const auto& r : records) s_.add(pool_, r.id, r.score);
    s_.close_round();
    last_batch_ = ids;
  }

  void log_round(int t) {
    RoundLog log;
    log.round = t;
    log.queries = s_.size();
    log.batch_ids = last_batch_;
    const auto rows = s_.rows();
    const auto scores = s_.scores();
    log.empirical_delta = group_auc_rows(pool_, rows, scores).delta;
    if (uses_certificate(config_.strategy)) {
      CertificateRun cr = certificate(s_, pool_, cerm_, warm_ ? &*warm_ : nullptr, t);
      log.certificate = cr.cert;
      log.estimate = cr.cert.midpoint;
      warm_ = std::move(cr.extremal);
    } else {
      log.estimate = log.empirical_delta;
    }
    log.truth = truth_;
    if (truth_ && log.estimate) log.abs_error = std::fabs(*log.estimate - *truth_);
    run_.rounds.push_back(std::move(log));
  }

  std::vector<std::size_t> candidate_rows(int t) {
    std::vector<std::size_t> rows = unqueried_rows(pool_, s_);
    const std::size_t m = config_.selection.candidates;
    if (m > 0 && rows.size() > m) {
      std::mt19937_64 rng(derive(seed_, 200 + static_cast<std::uint64_t>(t)));
      for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
        std::swap(rows[i], rows[pick(rng)]);
      }
      rows.resize(m);
      std::sort(rows.begin(), rows.end());
    }
    return rows;
  }

  std::vector<std::string> select(int t, std::size_t k) {
    const std::uint64_t round_seed = derive(seed_, 100 + static_cast<std::uint64_t>(t));
    switch (config_.strategy) {
      case Strategy::kRandom:
        return select_random(pool_, s_, k, round_seed);
      case Strategy::kStratified:
      case Strategy::kCermStratified:
        return select_stratified(pool_, s_, k, StratumKey::kGroupAndLabel, round_seed);
      case Strategy::kPower:
        return select_power(pool_, s_, k, config_.selection.gamma_pow, power_scores(), round_seed);
      case Strategy::kBafaDisagreement:
      case Strategy::kBafaBo:
      case Strategy::kBoOnly:
        return select_active(t, k);
    }
    return {};
  }

  std::vector<double> power_scores() {
    if (config_.selection.power_source == PowerSource::kOracle) {
      auto ref = scorer_->reference_scores(pool_);
      if (!ref) fail(ErrorCode::kConfigError, "oracle power sampling needs reference scores");
      return *ref;
    }
    // Pilot surrogate refit on S every round.
    const Surrogate pilot = fit_scores(s_, pool_, init_surrogate(pool_.dimension(), cerm_.arch, cerm_.seed),
                                       cerm_.prefit_steps, cerm_.learning_rate);
    return pilot.forward_all(FeatureView::of(pool_));
  }

  std::vector<std::string> select_active(int t, std::size_t k) {
    const SelectionSettings& cfg = config_.selection;
    const std::vector<std::size_t> rows = candidate_rows(t);
    const std::size_t n = rows.size();
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t r : rows) ids.push_back(pool_.at(r).id);

    const bool bo_only = config_.strategy == Strategy::kBoOnly;
    std::vector<double> base(n, 0.0);
    std::vector<std::vector<double>> phi(n);
    if (bo_only) {
      for (std::size_t i = 0; i < n; ++i) phi[i] = context_features(pool_, rows[i]);
    } else {
      const auto lo = scores_of_rows(warm_->low, pool_, rows);
      const auto hi = scores_of_rows(warm_->high, pool_, rows);
      for (std::size_t i = 0; i < n; ++i) {
        base[i] = std::fabs(hi[i] - lo[i]);
        const auto ctx = context_features(pool_, rows[i]);
        phi[i] = build_features(base[i], {std::span<const double>(ctx)});
      }
    }

    std::vector<double> acq01(n, 0.0);
    std::vector<double> combined = base;
    double mix = 0.0;
    if (config_.strategy == Strategy::kBafaBo || bo_only) {
      update_bo_targets();
      if (auto model = bo_.fit(cfg.kernel, cfg.gp_noise)) {
        const Schedule schedule = bo_only ? Schedule{0, 0, 1.0} : cfg.mix;
        BoCombined bc = bo_combine(base, *model, phi, cfg.beta, schedule, t);
        mix = bc.mix_weight;
        acq01 = bc.acq01;
        combined = bc.combined;
        if (cfg.bo_restrict_top && !bo_only && n > 0) {
          std::vector<double> sorted = base;
          const auto q = sorted.begin() + static_cast<std::ptrdiff_t>(cfg.bo_quantile * static_cast<double>(n - 1));
          std::nth_element(sorted.begin(), q, sorted.end());
          for (std::size_t i = 0; i < n; ++i) {
            if (base[i] < *q) combined[i] = (1.0 - mix) * base[i];
          }
        }
      } else if (bo_only) {
        // No acquisition data yet: fall back to a stratified pick.
        auto picked = select_stratified(pool_, s_, k, StratumKey::kGroupAndLabel,
                                        derive(seed_, 100 + static_cast<std::uint64_t>(t)));
        remember_picks(picked);
        return picked;
      }
    }

    const auto weights = distribution_weights(pool_, s_, cfg.alpha.value(t), cfg.ratio_cap);
    std::vector<double> final_score(n), dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = weights.at(pool_.stratum_of(rows[i], StratumKey::kGroupAndLabel));
      final_score[i] = combined[i] * dist[i];
    }
    const auto picks = mmr_select(ids, final_score, phi, k, cfg.gamma_div);

    if (cfg.write_diagnostics) {
      std::vector<SelectionScore> diag(n);
      for (std::size_t i = 0; i < n; ++i) diag[i] = {ids[i], base[i], acq01[i], mix, dist[i], final_score[i], false};
      for (std::size_t i : picks) diag[i].selected = true;
      run_.diagnostics_csv += selection_scores_csv_rows(t, diag);
    }
    std::vector<std::string> out;
    prev_phi_.clear();
    for (std::size_t i : picks) {
      out.push_back(ids[i]);
      prev_phi_.push_back(phi[i]);
    }
    return out;
  }

  void remember_picks(const std::vector<std::string>& ids) {
    prev_phi_.clear();
    for (const auto& id : ids) prev_phi_.push_back(context_features(pool_, pool_.require_row(id)));
  }

  // Credits the previous round's picks with the realised progress since then:
  // certificate width reduction (bafa_bo) or plug-in movement (bo_only).
  void update_bo_targets() {
    const auto& rounds = run_.rounds;
    if (prev_phi_.empty() || rounds.size() < 2) return;
    const RoundLog& now = rounds[rounds.size() - 1];
    const RoundLog& before = rounds[rounds.size() - 2];
    double progress = 0.0;
    if (config_.strategy == Strategy::kBoOnly) {
      if (now.empirical_delta && before.empirical_delta) {
        progress = std::fabs(*now.empirical_delta - *before.empirical_delta);
      }
    } else if (now.certificate && before.certificate) {
      progress = before.certificate->width - now.certificate->width;
    }
    const double y = progress / static_cast<double>(prev_phi_.size());
    for (auto& p : prev_phi_) bo_.add(std::move(p), y);
    prev_phi_.clear();
  }

  const AuditConfig& config_;
  const AuditPool& pool_;
  std::optional<double> truth_;
  std::unique_ptr<BlackBoxScorer> scorer_;
  std::uint64_t seed_;
  CermSettings cerm_;
  QueriedSet s_;
  std::vector<std::string> last_batch_;
  std::optional<ExtremalPair> warm_;
  BoDataset bo_;
  std::vector<std::vector<double>> prev_phi_;
  AuditRun run_;
};

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& field) {
  if (field.empty()) return std::nullopt;
  auto v = parse_double(field);
  if (!v) fail(ErrorCode::kParseError, "bad number in round log: " + field);
  return v;
}

}  // namespace

AuditRun run_audit(const AuditConfig& config, const AuditContext& context, std::uint64_t seed) {
  validate(config);
  if (!context.pool || !context.make_scorer) fail(ErrorCode::kPrecondition, "audit context is incomplete");
  return AuditLoop(config, context, seed).run();
}

std::string round_log_csv(const std::vector<RoundLog>& rounds) {
  std::string out =
      "round,queries,batch_ids,empirical_delta,mu_min,mu_max,midpoint,width,gap_min,gap_max,smooth_min,smooth_max,"
      "estimate,truth,abs_error\n";
  for (const RoundLog& r : rounds) {
    std::string ids;
    for (const auto& id : r.batch_ids) ids += (ids.empty() ? "" : ";") + id;
    std::vector<std::string> f{std::to_string(r.round), std::to_string(r.queries), ids, opt_field(r.empirical_delta)};
    if (r.certificate) {
      const Certificate& c = *r.certificate;
      for (double v : {c.mu_min, c.mu_max, c.midpoint, c.width, c.gap_min, c.gap_max, c.smooth_min, c.smooth_max}) {
        f.push_back(format_double(v));
      }
    } else {
      f.insert(f.end(), 8, std::string());
    }
    f.push_back(opt_field(r.estimate));
    f.push_back(opt_field(r.truth));
    f.push_back(opt_field(r.abs_error));
    out += csv_join(f) + "\n";
  }
  return out;
}

std::vector<RoundLog> parse_round_log_csv(const std::string& text) {
  std::vector<RoundLog> out;
  std::size_t start = 0;
  bool header = true;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto f = csv_split(line);
    if (!f || f->size() != 15) fail(ErrorCode::kParseError, "round log row: " + line);
    RoundLog r;
    const auto round = parse_int((*f)[0]);
    const auto queries = parse_int((*f)[1]);
    if (!round || !queries) fail(ErrorCode::kParseError, "round log row: " + line);
    r.round = static_cast<int>(*round);
    r.queries = static_cast<std::size_t>(*queries);
    const std::string& ids = (*f)[2];
    for (std::size_t p = 0; p < ids.size();) {
      std::size_t q = ids.find(';', p);
      if (q == std::string::npos) q = ids.size();
      r.batch_ids.push_back(ids.substr(p, q - p));
      p = q + 1;
    }
    r.empirical_delta = parse_opt((*f)[3]);
    if (!(*f)[4].empty()) {
      Certificate c;
      double* fields[] = {&c.mu_min, &c.mu_max, &c.midpoint, &c.width, &c.gap_min, &c.gap_max, &c.smooth_min, &c.smooth_max};
      for (int i = 0; i < 8; ++i) *fields[i] = *parse_opt((*f)[4 + i]);
      c.round = r.round;
      r.certificate = c;
    }
    r.estimate = parse_opt((*f)[12]);
    r.truth = parse_opt((*f)[13]);
    r.abs_error = parse_opt((*f)[14]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace activeaudit

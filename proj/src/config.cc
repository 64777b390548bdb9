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

#include "activeaudit/config.h"

#include <set>

#include "activeaudit/csv.h"
#include "activeaudit/errors.h"
#include "json.hpp"

namespace activeaudit {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kRandom: return "random";
    case Strategy::kStratified: return "stratified";
    case Strategy::kPower: return "power";
    case Strategy::kCermStratified: return "cerm_stratified";
    case Strategy::kBafaDisagreement: return "bafa_disagreement";
    case Strategy::kBafaBo: return "bafa_bo";
    case Strategy::kBoOnly: return "bo_only";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  for (Strategy s : {Strategy::kRandom, Strategy::kStratified, Strategy::kPower, Strategy::kCermStratified,
                     Strategy::kBafaDisagreement, Strategy::kBafaBo, Strategy::kBoOnly}) {
    if (text == to_string(s)) return s;
  }
  fail(ErrorCode::kConfigError, "unknown strategy: " + std::string(text));
}

bool uses_certificate(Strategy s) {
  return s == Strategy::kCermStratified || s == Strategy::kBafaDisagreement || s == Strategy::kBafaBo;
}

namespace {

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(ErrorCode::kConfigError, where_ + " must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) fail(ErrorCode::kConfigError, "unknown key " + where_ + "." + key);
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  template <typename T>
  void read(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::kConfigError, "bad type for " + path(key));
    }
  }

  void known(const std::string& key) { used_.insert(key); }

  const json& child(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

void read_schedule(Section& parent, const std::string& key, Schedule& s) {
  parent.known(key);
  if (!parent.has(key)) return;
  Section sec(parent.child(key), parent.path(key));
  sec.read("warmup", s.warmup_rounds);
  sec.read("ramp", s.ramp_rounds);
  sec.read("max", s.max_value);
}

void read_synthetic(const json& j, const std::string& where, SyntheticSpec& spec) {
  Section sec(j, where);
  sec.read("n", spec.n);
  sec.read("dimension", spec.dimension);
  sec.read("group_balance", spec.group_balance);
  std::vector<double> rates{spec.label_rates[0], spec.label_rates[1]};
  sec.read("label_rates", rates);
  if (rates.size() != 2) fail(ErrorCode::kConfigError, where + ".label_rates needs two entries");
  spec.label_rates = {rates[0], rates[1]};
  sec.read("separation", spec.separation);
  sec.read("weight_scale", spec.weight_scale);
  std::vector<double> band{spec.band_low, spec.band_high};
  sec.read("band", band);
  if (band.size() != 2) fail(ErrorCode::kConfigError, where + ".band needs two entries");
  spec.band_low = band[0];
  spec.band_high = band[1];
  std::string mode = to_string(spec.mode);
  sec.read("mode", mode);
  spec.mode = parse_bias_mode(mode);
  sec.read("noise_scale", spec.noise_scale);
  sec.known("forced_flip_prob");
  if (sec.has("forced_flip_prob")) {
    double p = 0.0;
    sec.read("forced_flip_prob", p);
    spec.forced_flip_prob = p;
  }
  sec.read("seed", spec.seed);
}

KernelKind parse_kernel(const std::string& text) {
  if (text == "matern52") return KernelKind::kMatern52;
  if (text == "rbf") return KernelKind::kRbf;
  fail(ErrorCode::kConfigError, "unknown kernel: " + text);
}

std::string kernel_name(KernelKind k) { return k == KernelKind::kRbf ? "rbf" : "matern52"; }

std::string scorer_kind_name(ScorerKind k) {
  switch (k) {
    case ScorerKind::kSynthetic: return "synthetic";
    case ScorerKind::kPlanted: return "planted";
    case ScorerKind::kTable: return "table";
    case ScorerKind::kRemote: return "remote";
  }
  return "?";
}

ScorerKind parse_scorer_kind(const std::string& text) {
  for (ScorerKind k : {ScorerKind::kSynthetic, ScorerKind::kPlanted, ScorerKind::kTable, ScorerKind::kRemote}) {
    if (text == scorer_kind_name(k)) return k;
  }
  fail(ErrorCode::kConfigError, "unknown scorer kind: " + text);
}

}  // namespace

AuditConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  AuditConfig c;
  {
    Section top(root, "config");
    if (top.has("pool")) {
      Section pool(top.child("pool"), "pool");
      if (pool.has("path")) {
        std::string p;
        pool.read("path", p);
        c.pool.path = p;
      }
      if (pool.has("synthetic")) {
        SyntheticSpec spec;
        read_synthetic(pool.child("synthetic"), "pool.synthetic", spec);
        c.pool.synthetic = spec;
      }
    }
    if (top.has("scorer")) {
      Section sc(top.child("scorer"), "scorer");
      std::string kind = scorer_kind_name(c.scorer.kind);
      sc.read("kind", kind);
      c.scorer.kind = parse_scorer_kind(kind);
      sc.read("path", c.scorer.path);
      sc.read("endpoint", c.scorer.endpoint);
      sc.read("timeout_seconds", c.scorer.remote.timeout_seconds);
      sc.read("max_batch", c.scorer.remote.max_batch);
      sc.read("retries", c.scorer.remote.retries);
      sc.read("credential_env", c.scorer.remote.credential_env);
    }
    std::string strategy = to_string(c.strategy);
    top.read("strategy", strategy);
    c.strategy = parse_strategy(strategy);
    top.read("budget", c.budget);
    top.read("batch", c.batch);
    top.read("seed_multiplier", c.seed_multiplier);
    if (top.has("cerm")) {
      Section ce(top.child("cerm"), "cerm");
      ce.read("lambda", c.cerm.lambda);
      ce.read("tau", c.cerm.tau);
      ce.read("epochs", c.cerm.epochs);
      ce.read("steps_per_epoch", c.cerm.steps_per_epoch);
      ce.read("batch", c.cerm.batch);
      ce.read("learning_rate", c.cerm.learning_rate);
      ce.read("rho_init", c.cerm.rho_init);
      ce.read("rho_max", c.cerm.rho_max);
      ce.read("objective_sample", c.cerm.objective_sample);
      ce.read("box_bound", c.cerm.box_bound);
      ce.read("prefit_steps", c.cerm.prefit_steps);
      ce.read("cold_starts", c.cerm.cold_starts);
      ce.read("parallel", c.cerm.parallel);
      std::string arch = to_string(c.cerm.arch);
      ce.read("architecture", arch);
      c.cerm.arch = parse_architecture(arch);
    }
    if (top.has("selection")) {
      Section se(top.child("selection"), "selection");
      se.read("beta", c.selection.beta);
      se.read("gamma_div", c.selection.gamma_div);
      se.read("gamma_pow", c.selection.gamma_pow);
      read_schedule(se, "mix", c.selection.mix);
      read_schedule(se, "alpha", c.selection.alpha);
      se.read("ratio_cap", c.selection.ratio_cap);
      se.read("candidates", c.selection.candidates);
      se.read("bo_restrict_top", c.selection.bo_restrict_top);
      se.read("bo_quantile", c.selection.bo_quantile);
      std::string kernel = kernel_name(c.selection.kernel);
      se.read("kernel", kernel);
      c.selection.kernel = parse_kernel(kernel);
      se.read("gp_noise", c.selection.gp_noise);
      std::string power = c.selection.power_source == PowerSource::kOracle ? "oracle" : "surrogate";
      se.read("power_source", power);
      if (power != "oracle" && power != "surrogate") fail(ErrorCode::kConfigError, "unknown power_source: " + power);
      c.selection.power_source = power == "oracle" ? PowerSource::kOracle : PowerSource::kSurrogate;
      se.read("write_diagnostics", c.selection.write_diagnostics);
    }
    top.read("epsilons", c.epsilons);
    top.read("seeds", c.seeds);
    top.read("early_stop", c.early_stop);
    top.read("stop_epsilon", c.stop_epsilon);
    top.read("auec_t_max", c.auec_t_max);
    top.read("report_budgets", c.report_budgets);
    top.read("jobs", c.jobs);
  }
  validate(c);
  return c;
}

AuditConfig load_config(const std::string& path) {
  std::string text;
  try {
    for (const auto& line : read_lines(path)) text += line + "\n";
  } catch (const AuditError& e) {
    fail(ErrorCode::kConfigError, "cannot read config " + path + ": " + e.detail());
  }
  return parse_config(text);
}

void validate(const AuditConfig& c) {
  auto bad = [](const std::string& what) { fail(ErrorCode::kConfigError, what); };
  if (c.pool.path.has_value() == c.pool.synthetic.has_value()) bad("pool needs exactly one of path / synthetic");
  if (c.scorer.kind == ScorerKind::kSynthetic && !c.pool.synthetic) bad("scorer.kind synthetic needs pool.synthetic");
  if ((c.scorer.kind == ScorerKind::kPlanted || c.scorer.kind == ScorerKind::kTable) && c.scorer.path.empty()) {
    bad("scorer.path is required for kind " + scorer_kind_name(c.scorer.kind));
  }
  if (c.scorer.kind == ScorerKind::kRemote && c.scorer.endpoint.empty()) bad("scorer.endpoint is required");
  if (c.batch < 1) bad("batch must be >= 1");
  if (c.seed_multiplier < 1) bad("seed_multiplier must be >= 1");
  if (c.budget < 4 * c.seed_multiplier) bad("budget must cover the seed set (4 x seed_multiplier)");
  if (c.seeds.empty()) bad("seeds must be non-empty");
  if (!(c.cerm.lambda > 0.0)) bad("cerm.lambda must be > 0");
  if (!(c.cerm.tau > 0.0)) bad("cerm.tau must be > 0");
  if (c.cerm.epochs < 1 || c.cerm.steps_per_epoch < 1) bad("cerm.epochs and cerm.steps_per_epoch must be >= 1");
  if (!(c.cerm.learning_rate > 0.0)) bad("cerm.learning_rate must be > 0");
  if (!(c.cerm.rho_init > 0.0) || c.cerm.rho_max < c.cerm.rho_init) bad("cerm.rho_init / rho_max");
  if (c.cerm.prefit_steps < 0 || c.cerm.cold_starts < 0) bad("cerm.prefit_steps and cerm.cold_starts must be >= 0");
  if (c.selection.ratio_cap < 1.0) bad("selection.ratio_cap must be >= 1");
  if (c.selection.gamma_pow < 0.0 || c.selection.gamma_div < 0.0) bad("selection gammas must be >= 0");
  if (c.selection.gp_noise < 0.0) bad("selection.gp_noise must be >= 0");
  if (!(c.selection.bo_quantile >= 0.0 && c.selection.bo_quantile < 1.0)) bad("selection.bo_quantile in [0,1)");
  for (const Schedule* s : {&c.selection.mix, &c.selection.alpha}) {
    if (s->warmup_rounds < 0 || s->ramp_rounds < 0) bad("schedule rounds must be >= 0");
  }
  if (c.selection.mix.max_value < 0.0 || c.selection.mix.max_value > 1.0) bad("selection.mix.max in [0,1]");
  if (c.selection.alpha.max_value < 0.0) bad("selection.alpha.max must be >= 0");
  for (double e : c.epsilons) {
    if (!(e > 0.0)) bad("epsilons must be > 0");
  }
  if (c.auec_t_max < 1) bad("auec_t_max must be >= 1");
  if (c.jobs < 1) bad("jobs must be >= 1");
  if (c.selection.power_source == PowerSource::kOracle && c.scorer.kind == ScorerKind::kRemote) {
    bad("oracle power sampling needs a synthetic or cached scorer");
  }
}

std::string config_to_json(const AuditConfig& c) {
  ordered_json j;
  if (c.pool.path) j["pool"]["path"] = *c.pool.path;
  if (c.pool.synthetic) {
    const SyntheticSpec& s = *c.pool.synthetic;
    ordered_json sj;
    sj["n"] = s.n;
    sj["dimension"] = s.dimension;
    sj["group_balance"] = s.group_balance;
    sj["label_rates"] = {s.label_rates[0], s.label_rates[1]};
    sj["separation"] = s.separation;
    sj["weight_scale"] = s.weight_scale;
    sj["band"] = {s.band_low, s.band_high};
    sj["mode"] = to_string(s.mode);
    sj["noise_scale"] = s.noise_scale;
    if (s.forced_flip_prob) sj["forced_flip_prob"] = *s.forced_flip_prob;
    sj["seed"] = s.seed;
    j["pool"]["synthetic"] = sj;
  }
  j["scorer"]["kind"] = scorer_kind_name(c.scorer.kind);
  if (!c.scorer.path.empty()) j["scorer"]["path"] = c.scorer.path;
  if (!c.scorer.endpoint.empty()) {
    j["scorer"]["endpoint"] = c.scorer.endpoint;
    j["scorer"]["timeout_seconds"] = c.scorer.remote.timeout_seconds;
    j["scorer"]["max_batch"] = c.scorer.remote.max_batch;
    j["scorer"]["retries"] = c.scorer.remote.retries;
    j["scorer"]["credential_env"] = c.scorer.remote.credential_env;
  }
  j["strategy"] = to_string(c.strategy);
  j["budget"] = c.budget;
  j["batch"] = c.batch;
  j["seed_multiplier"] = c.seed_multiplier;
  j["cerm"] = {{"lambda", c.cerm.lambda},
               {"tau", c.cerm.tau},
               {"epochs", c.cerm.epochs},
               {"steps_per_epoch", c.cerm.steps_per_epoch},
               {"batch", c.cerm.batch},
               {"learning_rate", c.cerm.learning_rate},
               {"rho_init", c.cerm.rho_init},
               {"rho_max", c.cerm.rho_max},
               {"objective_sample", c.cerm.objective_sample},
               {"box_bound", c.cerm.box_bound},
               {"prefit_steps", c.cerm.prefit_steps},
               {"cold_starts", c.cerm.cold_starts},
               {"parallel", c.cerm.parallel},
               {"architecture", to_string(c.cerm.arch)}};
  auto sched = [](const Schedule& s) {
    return ordered_json{{"warmup", s.warmup_rounds}, {"ramp", s.ramp_rounds}, {"max", s.max_value}};
  };
  const SelectionSettings& se = c.selection;
  j["selection"] = {{"beta", se.beta},
                    {"gamma_div", se.gamma_div},
                    {"gamma_pow", se.gamma_pow},
                    {"mix", sched(se.mix)},
                    {"alpha", sched(se.alpha)},
                    {"ratio_cap", se.ratio_cap},
                    {"candidates", se.candidates},
                    {"bo_restrict_top", se.bo_restrict_top},
                    {"bo_quantile", se.bo_quantile},
                    {"kernel", kernel_name(se.kernel)},
                    {"gp_noise", se.gp_noise},
                    {"power_source", se.power_source == PowerSource::kOracle ? "oracle" : "surrogate"},
                    {"write_diagnostics", se.write_diagnostics}};
  j["epsilons"] = c.epsilons;
  j["seeds"] = c.seeds;
  j["early_stop"] = c.early_stop;
  j["stop_epsilon"] = c.stop_epsilon;
  j["auec_t_max"] = c.auec_t_max;
  j["report_budgets"] = c.report_budgets;
  j["jobs"] = c.jobs;
  return j.dump(2) + "\n";
}

}  // namespace activeaudit

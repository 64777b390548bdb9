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

// activeaudit: command-line front end.
//
//   activeaudit generate  --out-dir DIR [--n 5000 --dimension 32 --seed 0 ...]
//   activeaudit run       --config FILE --out-dir DIR [--strategy S] [--seeds 0,1,2]
//   activeaudit compare   --config FILE --out-dir DIR [--strategies a,b,c]
//   activeaudit bounds    [--epsilon 0.05,0.02] [--delta 0.05,0.1]
//   activeaudit plot-data --in-dir DIR [--out FILE]
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "activeaudit/blackbox.h"
#include "activeaudit/config.h"
#include "activeaudit/csv.h"
#include "activeaudit/errors.h"
#include "activeaudit/experiment.h"
#include "activeaudit/harness.h"
#include "activeaudit/metrics.h"
#include "activeaudit/synthetic.h"
#include "json.hpp"

namespace aa = activeaudit;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int generate(const fs::path& out_dir, const aa::SyntheticSpec& spec) {
  const aa::SyntheticBenchmark bench = aa::generate_synthetic_pool(spec);
  fs::create_directories(out_dir);
  aa::write_pool(bench.pool, (out_dir / "pool.csv").string(), aa::PoolFormat::kCsv);
  aa::write_text_file((out_dir / "scorer.json").string(), aa::planted_bias_to_json(bench.scorer) + "\n");
  nlohmann::ordered_json truth;
  truth["delta_true"] = bench.delta_true;
  truth["flip_prob"] = bench.flip_prob;
  truth["mode"] = aa::to_string(spec.mode);
  aa::write_text_file((out_dir / "truth.json").string(), truth.dump(2) + "\n");

  aa::AuditConfig cfg;
  cfg.pool.path = fs::absolute(out_dir / "pool.csv").string();
  cfg.scorer.kind = aa::ScorerKind::kPlanted;
  cfg.scorer.path = fs::absolute(out_dir / "scorer.json").string();
  aa::write_text_file((out_dir / "config.json").string(), aa::config_to_json(cfg));
  std::printf("pool: %zu examples, d=%zu, delta_true=%.6f (flip prob %.6f)\n", bench.pool.size(),
              bench.pool.dimension(), bench.delta_true, bench.flip_prob);
  return 0;
}

void print_summary(const std::vector<aa::StrategySummary>& summaries) {
  std::printf("%-18s %6s", "strategy", "seeds");
  if (!summaries.empty()) {
    for (double e : summaries.front().epsilons) std::printf(" %10s", ("t@" + aa::format_double(e)).c_str());
  }
  std::printf(" %10s %10s %9s\n", "AUEC/t", "coverage", "pearson");
  for (const auto& s : summaries) {
    std::printf("%-18s %6zu", aa::to_string(s.strategy).c_str(), s.seeds);
    for (const auto& t : s.t_eps) {
      std::printf(" %10s", t ? std::to_string(*t).c_str() : "-");
    }
    std::printf(" %10.5f", s.auec.mean);
    std::printf(" %10s", s.coverage ? aa::format_double(*s.coverage).substr(0, 6).c_str() : "-");
    std::printf(" %9s\n", s.width_error_pearson ? aa::format_double(*s.width_error_pearson).substr(0, 6).c_str() : "-");
  }
}

int run_matrix(const std::string& config_path, const fs::path& out_dir, const std::vector<std::string>& strategy_names,
               const std::vector<std::uint64_t>& seeds, std::size_t jobs) {
  aa::AuditConfig cfg = aa::load_config(config_path);
  if (!seeds.empty()) cfg.seeds = seeds;
  if (jobs > 0) cfg.jobs = jobs;
  std::vector<aa::Strategy> strategies;
  for (const auto& name : strategy_names) strategies.push_back(aa::parse_strategy(name));
  if (strategies.empty()) strategies.push_back(cfg.strategy);
  aa::validate(cfg);
  const aa::AuditContext ctx = aa::make_context(cfg);
  const aa::ExperimentResult result = aa::run_experiment(cfg, ctx, strategies, cfg.seeds);
  aa::write_experiment(result, out_dir.string());
  aa::write_text_file((out_dir / "config.json").string(), aa::config_to_json(cfg));
  print_summary(result.summaries);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query-efficient black-box fairness auditing (Delta-AUC certificates)"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a synthetic planted-bias pool, scorer and config");
  std::string gen_out;
  aa::SyntheticSpec spec;
  std::string mode = "reflect";
  double label_rate = 0.3;
  gen->add_option("--out-dir", gen_out, "output directory")->required();
  gen->add_option("--n", spec.n, "pool size");
  gen->add_option("--dimension", spec.dimension, "feature dimension");
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--group-balance", spec.group_balance, "P(group = 1)");
  gen->add_option("--label-rate", label_rate, "P(label = 1) in both groups");
  gen->add_option("--band-low", spec.band_low, "lower end of the target Delta-AUC band");
  gen->add_option("--band-high", spec.band_high, "upper end of the target Delta-AUC band");
  gen->add_option("--mode", mode, "reflect | score_flip");
  gen->add_option("--noise-scale", spec.noise_scale, "scorer logit noise");

  auto* run = app.add_subcommand("run", "Run one strategy over a list of seeds");
  std::string run_config, run_out, run_strategy;
  std::vector<std::uint64_t> run_seeds;
  std::size_t run_jobs = 0;
  run->add_option("--config", run_config, "config JSON")->required();
  run->add_option("--out-dir", run_out, "output directory")->required();
  run->add_option("--strategy", run_strategy, "override the configured strategy");
  run->add_option("--seeds", run_seeds, "seeds (overrides config)")->delimiter(',');
  run->add_option("--jobs", run_jobs, "concurrent seeds");

  auto* cmp = app.add_subcommand("compare", "Run a strategy matrix and print a summary table");
  std::string cmp_config, cmp_out;
  std::vector<std::string> cmp_strategies{"random", "stratified", "power", "cerm_stratified", "bafa_disagreement",
                                          "bafa_bo", "bo_only"};
  std::vector<std::uint64_t> cmp_seeds;
  std::size_t cmp_jobs = 0;
  cmp->add_option("--config", cmp_config, "config JSON")->required();
  cmp->add_option("--out-dir", cmp_out, "output directory")->required();
  cmp->add_option("--strategies", cmp_strategies, "strategies")->delimiter(',');
  cmp->add_option("--seeds", cmp_seeds, "seeds (overrides config)")->delimiter(',');
  cmp->add_option("--jobs", cmp_jobs, "concurrent seeds");

  auto* bnd = app.add_subcommand("bounds", "Passive per-cell sample sizes from McDiarmid's inequality");
  std::vector<double> epsilons{0.05, 0.02}, deltas{0.05, 0.1};
  bnd->add_option("--epsilon", epsilons, "accuracy targets")->delimiter(',');
  bnd->add_option("--delta", deltas, "failure probabilities")->delimiter(',');

  auto* plot = app.add_subcommand("plot-data", "Tidy long-format csv (strategy,seed,q,error,width)");
  std::string plot_in, plot_out;
  plot->add_option("--in-dir", plot_in, "directory written by run/compare")->required();
  plot->add_option("--out", plot_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) {
      spec.label_rates = {label_rate, label_rate};
      spec.mode = aa::parse_bias_mode(mode);
      return generate(gen_out, spec);
    }
    if (*run) {
      std::vector<std::string> names;
      if (!run_strategy.empty()) names.push_back(run_strategy);
      return run_matrix(run_config, run_out, names, run_seeds, run_jobs);
    }
    if (*cmp) return run_matrix(cmp_config, cmp_out, cmp_strategies, cmp_seeds, cmp_jobs);
    if (*bnd) {
      std::printf("epsilon,delta,per_cell\n");
      for (double e : epsilons) {
        for (double d : deltas) {
          std::printf("%s,%s,%lld\n", aa::format_double(e).c_str(), aa::format_double(d).c_str(),
                      static_cast<long long>(aa::mcdiarmid_sample_size(e, d)));
        }
      }
      return 0;
    }
    if (*plot) {
      const std::string data = aa::plot_data_from_dir(plot_in);
      if (plot_out.empty()) {
        std::fputs(data.c_str(), stdout);
      } else {
        aa::write_text_file(plot_out, data);
      }
      return 0;
    }
  } catch (const aa::AuditError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const bool config = e.code() == aa::ErrorCode::kConfigError || e.code() == aa::ErrorCode::kInvalidRange ||
                        e.code() == aa::ErrorCode::kInvalidArchitecture;
    return config ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}

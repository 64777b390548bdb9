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

#include "activeaudit/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <regex>
#include <thread>
#include <tuple>

#include "activeaudit/csv.h"
#include "activeaudit/errors.h"

namespace activeaudit {

namespace fs = std::filesystem;

bool earlier(const std::optional<long long>& a, const std::optional<long long>& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

StrategySummary summarize_runs(const std::vector<AuditRun>& runs, const AuditConfig& config) {
  StrategySummary s;
  if (!runs.empty()) s.strategy = runs.front().strategy;
  s.seeds = runs.size();
  s.epsilons = config.epsilons;

  std::vector<ErrorCurve> curves;
  std::vector<double> widths, errors, violations;
  std::size_t covered = 0;
  for (const AuditRun& run : runs) {
    ErrorCurve curve;
    curve.seed = static_cast<long long>(run.seed);
    for (const RoundLog& r : run.rounds) {
      if (r.abs_error) curve.points.push_back({static_cast<long long>(r.queries), *r.abs_error});
      if (r.round == 0 || !r.certificate || !r.truth) continue;
      const Certificate& c = *r.certificate;
      ++s.certified_rounds;
      const double v = bound_violation(c.mu_min, c.mu_max, *r.truth);
      const bool feasible = std::max(c.gap_min, c.gap_max) <= config.cerm.lambda;
      if (!feasible) ++s.infeasible_rounds;
      violations.push_back(v);
      if (v == 0.0 && feasible) ++covered;
      widths.push_back(c.width);
      errors.push_back(std::fabs(c.midpoint - *r.truth));
    }
    if (!curve.points.empty()) curves.push_back(std::move(curve));
  }
  if (s.certified_rounds > 0) {
    s.coverage = static_cast<double>(covered) / static_cast<double>(s.certified_rounds);
    s.mean_violation = mean(violations);
    if (widths.size() >= 3) {
      s.width_error_pearson = pearson(widths, errors);
      s.width_error_spearman = spearman(widths, errors);
    }
  }
  if (curves.empty()) return s;

  s.mean_curve = mean_curve(curves);
  for (double eps : config.epsilons) s.t_eps.push_back(queries_to_epsilon(s.mean_curve, eps));
  s.auec_t_max = std::min<long long>(static_cast<long long>(config.auec_t_max), s.mean_curve.points.back().queries);
  s.auec = auec(s.mean_curve, s.auec_t_max);
  for (std::size_t b : config.report_budgets) {
    std::vector<double> at;
    for (const auto& c : curves) at.push_back(c.value_at(static_cast<long long>(b)));
    s.budget_errors.push_back({static_cast<long long>(b), mean(at), sample_sd(at)});
  }
  return s;
}

ExperimentResult run_experiment(const AuditConfig& config, const AuditContext& context,
                                const std::vector<Strategy>& strategies, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) fail(ErrorCode::kConfigError, "at least one seed is required");
  ExperimentResult result;
  for (Strategy strategy : strategies) {
    AuditConfig cfg = config;
    cfg.strategy = strategy;
    std::vector<AuditRun> runs(seeds.size());
    if (config.jobs <= 1 || seeds.size() == 1) {
      for (std::size_t i = 0; i < seeds.size(); ++i) runs[i] = run_audit(cfg, context, seeds[i]);
    } else {
      std::atomic<std::size_t> next{0};
      std::exception_ptr error;
      std::mutex error_mutex;
      std::vector<std::thread> workers;
      const std::size_t jobs = std::min(config.jobs, seeds.size());
      for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
          for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
              runs[i] = run_audit(cfg, context, seeds[i]);
            } catch (...) {
              std::lock_guard<std::mutex> lock(error_mutex);
              if (!error) error = std::current_exception();
            }
          }
        });
      }
      for (auto& w : workers) w.join();
      if (error) std::rethrow_exception(error);
    }
    result.summaries.push_back(summarize_runs(runs, cfg));
    result.runs.push_back(std::move(runs));
  }
  return result;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string summary_csv(const std::vector<StrategySummary>& summaries) {
  std::vector<std::string> head{"strategy", "seeds"};
  if (!summaries.empty()) {
    for (double e : summaries.front().epsilons) head.push_back("t_eps_" + format_double(e));
    head.push_back("auec_t_max");
    head.push_back("auec_sum");
    head.push_back("auec_mean");
    for (const auto& b : summaries.front().budget_errors) {
      head.push_back("err_mean_at_" + std::to_string(b.budget));
      head.push_back("err_sd_at_" + std::to_string(b.budget));
    }
  }
  for (const char* h : {"certified_rounds", "infeasible_rounds", "coverage", "mean_violation", "pearson_width_error",
                        "spearman_width_error"}) {
    head.push_back(h);
  }
  std::string out = csv_join(head) + "\n";
  for (const auto& s : summaries) {
    std::vector<std::string> f{to_string(s.strategy), std::to_string(s.seeds)};
    for (std::size_t i = 0; i < s.epsilons.size(); ++i) {
      f.push_back(i < s.t_eps.size() && s.t_eps[i] ? std::to_string(*s.t_eps[i]) : "not_reached");
    }
    f.push_back(std::to_string(s.auec_t_max));
    f.push_back(format_double(s.auec.sum));
    f.push_back(format_double(s.auec.mean));
    for (const auto& b : s.budget_errors) {
      f.push_back(format_double(b.mean));
      f.push_back(format_double(b.sd));
    }
    f.push_back(std::to_string(s.certified_rounds));
    f.push_back(std::to_string(s.infeasible_rounds));
    f.push_back(opt(s.coverage));
    f.push_back(opt(s.mean_violation));
    f.push_back(opt(s.width_error_pearson));
    f.push_back(opt(s.width_error_spearman));
    out += csv_join(f) + "\n";
  }
  return out;
}

namespace {

void append_plot_rows(std::string& out, const std::string& strategy, std::uint64_t seed,
                      const std::vector<RoundLog>& rounds) {
  for (const RoundLog& r : rounds) {
    out += csv_join({strategy, std::to_string(seed), std::to_string(r.queries), opt(r.abs_error),
                     r.certificate ? format_double(r.certificate->width) : std::string()}) +
           "\n";
  }
}

constexpr const char* kPlotHeader = "strategy,seed,q,error,width\n";

}  // namespace

std::string plot_data_csv(const ExperimentResult& result) {
  std::string out = kPlotHeader;
  for (const auto& runs : result.runs) {
    for (const auto& run : runs) append_plot_rows(out, to_string(run.strategy), run.seed, run.rounds);
  }
  return out;
}

void write_experiment(const ExperimentResult& result, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "logs", ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  write_text_file((fs::path(dir) / "summary.csv").string(), summary_csv(result.summaries));
  std::string timing = "strategy,seed,round,wall_seconds\n";
  for (const auto& runs : result.runs) {
    for (const auto& run : runs) {
      const std::string stem = to_string(run.strategy) + "_seed" + std::to_string(run.seed);
      write_text_file((fs::path(dir) / "logs" / (stem + ".csv")).string(), round_log_csv(run.rounds));
      if (!run.diagnostics_csv.empty()) {
        write_text_file((fs::path(dir) / "logs" / (stem + "_selection.csv")).string(), run.diagnostics_csv);
      }
      for (std::size_t i = 0; i < run.wall_seconds.size(); ++i) {
        timing += csv_join({to_string(run.strategy), std::to_string(run.seed), std::to_string(i),
                            format_double(run.wall_seconds[i])}) +
                  "\n";
      }
    }
  }
  write_text_file((fs::path(dir) / "timing.csv").string(), timing);
}

std::string plot_data_from_dir(const std::string& dir) {
  const fs::path logs = fs::path(dir) / "logs";
  if (!fs::is_directory(logs)) fail(ErrorCode::kIoError, "no logs directory under " + dir);
  // Strategies in summary.csv order when it exists (the order they ran in),
  // otherwise by name; seeds numerically.
  std::vector<std::string> order;
  if (fs::exists(fs::path(dir) / "summary.csv")) {
    const auto lines = read_lines((fs::path(dir) / "summary.csv").string());
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (!lines[i].empty()) order.push_back(lines[i].substr(0, lines[i].find(',')));
    }
  }
  auto rank = [&](const std::string& strategy) {
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), strategy) - order.begin());
  };
  static const std::regex name(R"(([a-z_]+)_seed([0-9]+)\.csv)");
  std::vector<std::tuple<std::size_t, std::string, std::uint64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(logs)) {
    std::smatch m;
    const std::string file = entry.path().filename().string();
    if (!std::regex_match(file, m, name)) continue;
    files.emplace_back(rank(m[1].str()), m[1].str(), std::stoull(m[2].str()), entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string out = kPlotHeader;
  for (const auto& [r, strategy, seed, path] : files) {
    std::string text;
    for (const auto& line : read_lines(path.string())) text += line + "\n";
    append_plot_rows(out, strategy, seed, parse_round_log_csv(text));
  }
  return out;
}

}  // namespace activeaudit

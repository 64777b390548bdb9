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

#include "activeaudit/blackbox.h"

#include <algorithm>
#include <cmath>

#include "activeaudit/csv.h"
#include "activeaudit/errors.h"
#include "activeaudit/hashing.h"
#include "activeaudit/simd/kernels.h"
#include "json.hpp"

namespace activeaudit {

namespace {
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;  // "noise"
constexpr std::uint64_t kFlipStream = 0x666c6970ULL;     // "flip"

void check_score(const std::string& id, double s) {
  if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
    fail(ErrorCode::kRemoteProtocolError, "out-of-range score for " + id);
  }
}
}  // namespace

void validate(const PlantedBiasConfig& config) {
  for (double p : {config.flip_prob_group0, config.flip_prob_group1}) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidProbability, format_double(p));
  }
  if (!(config.noise_scale >= 0.0) || !std::isfinite(config.noise_scale)) {
    fail(ErrorCode::kInvalidRange, "noise_scale must be a nonnegative real");
  }
  if (config.base_weights.empty()) fail(ErrorCode::kInvalidRange, "base_weights must be non-empty");
}

std::string planted_bias_to_json(const PlantedBiasConfig& config) {
  nlohmann::ordered_json j;
  j["type"] = "planted_bias";
  j["base_weights"] = config.base_weights;
  j["bias"] = config.bias;
  j["flip_prob_group0"] = config.flip_prob_group0;
  j["flip_prob_group1"] = config.flip_prob_group1;
  j["noise_scale"] = config.noise_scale;
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

PlantedBiasConfig planted_bias_from_json(const std::string& text) {
  PlantedBiasConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.base_weights = j.at("base_weights").get<std::vector<double>>();
    c.bias = j.value("bias", 0.0);
    c.flip_prob_group0 = j.value("flip_prob_group0", 0.0);
    c.flip_prob_group1 = j.value("flip_prob_group1", 0.0);
    c.noise_scale = j.value("noise_scale", 0.0);
    c.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("planted-bias config: ") + e.what());
  }
  validate(c);
  return c;
}

// ---- BlackBoxScorer -----------------------------------------------------

BlackBoxScorer::BlackBoxScorer(std::string identity, std::optional<std::size_t> dimension)
    : identity_(std::move(identity)), dimension_(dimension) {}

std::vector<ScoreRecord> BlackBoxScorer::score_batch(std::span<const AuditExample> examples) {
  std::vector<const AuditExample*> ptrs;
  ptrs.reserve(examples.size());
  for (const auto& ex : examples) ptrs.push_back(&ex);
  return score_batch(ptrs);
}

std::vector<ScoreRecord> BlackBoxScorer::score_batch(std::span<const AuditExample* const> examples) {
  if (dimension_) {
    for (const AuditExample* ex : examples) {
      if (ex->features.size() != *dimension_) {
        fail(ErrorCode::kDimensionMismatch, ex->id + ": expected " + std::to_string(*dimension_) +
                                                " features, got " + std::to_string(ex->features.size()));
      }
    }
  }
  // Holding the lock across compute_scores keeps concurrent callers from
  // sending the same id twice.
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<const AuditExample*> missing;
  std::unordered_map<std::string, bool> pending;
  for (const AuditExample* ex : examples) {
    if (cache_.count(ex->id) || pending.count(ex->id)) continue;
    pending.emplace(ex->id, true);
    missing.push_back(ex);
  }
  if (!missing.empty()) {
    const std::vector<double> fresh = compute_scores(missing);
    if (fresh.size() != missing.size()) fail(ErrorCode::kRemoteProtocolError, "scorer returned wrong count");
    for (std::size_t i = 0; i < missing.size(); ++i) {
      check_score(missing[i]->id, fresh[i]);
      cache_.emplace(missing[i]->id, fresh[i]);
      sent_.push_back(missing[i]->id);
    }
  }
  hits_ += examples.size() - missing.size();
  std::vector<ScoreRecord> out;
  out.reserve(examples.size());
  for (const AuditExample* ex : examples) out.push_back({ex->id, cache_.at(ex->id)});
  return out;
}

std::size_t BlackBoxScorer::distinct_queries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sent_.size();
}

std::vector<std::string> BlackBoxScorer::queried_ids() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sent_;
}

std::size_t BlackBoxScorer::cache_hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}

std::string BlackBoxScorer::cache_csv() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> ids;
  ids.reserve(cache_.size());
  for (const auto& [id, s] : cache_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  std::string out = "id,score\n";
  for (const auto& id : ids) out += csv_join({id, format_double(cache_.at(id))}) + "\n";
  return out;
}

void BlackBoxScorer::save_cache_csv(const std::string& path) const { write_text_file(path, cache_csv()); }

std::unordered_map<std::string, double> read_score_table(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "id,score") fail(ErrorCode::kParseError, "line 1: expected header id,score");
  std::unordered_map<std::string, double> table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = csv_split(lines[i]);
    if (!fields || fields->size() != 2) fail(ErrorCode::kParseError, "line " + std::to_string(i + 1));
    auto s = parse_double((*fields)[1]);
    if (!s || !std::isfinite(*s) || *s < 0.0 || *s > 1.0) {
      fail(ErrorCode::kParseError, "line " + std::to_string(i + 1) + ": score must be in [0,1]");
    }
    if (!table.emplace((*fields)[0], *s).second) fail(ErrorCode::kDuplicateId, (*fields)[0]);
  }
  return table;
}

void BlackBoxScorer::load_cache_csv(const std::string& path) {
  auto table = read_score_table(path);
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& [id, s] : table) cache_.emplace(id, s);
}

std::optional<std::vector<double>> BlackBoxScorer::reference_scores(const AuditPool&) const {
  return std::nullopt;
}

// ---- PlantedBiasScorer --------------------------------------------------

PlantedBiasScorer::PlantedBiasScorer(PlantedBiasConfig config)
    : BlackBoxScorer("planted_bias:" + std::to_string(config.seed), config.base_weights.size()),
      config_(std::move(config)) {
  validate(config_);
}

bool PlantedBiasScorer::is_flipped(const AuditExample& example) const {
  const double p = example.group == 0 ? config_.flip_prob_group0 : config_.flip_prob_group1;
  if (p <= 0.0) return false;
  return hash_uniform(config_.seed, kFlipStream, example.id) < p;
}

double PlantedBiasScorer::score_of(const AuditExample& example) const {
  if (example.features.size() != config_.base_weights.size()) {
    fail(ErrorCode::kDimensionMismatch, example.id);
  }
  double z = config_.bias;
  for (std::size_t i = 0; i < example.features.size(); ++i) z += config_.base_weights[i] * example.features[i];
  if (config_.noise_scale > 0.0) z += config_.noise_scale * hash_gaussian(config_.seed, kNoiseStream, example.id);
  const double s = simd::sigmoid(z);
  return is_flipped(example) ? 1.0 - s : s;
}

std::vector<double> PlantedBiasScorer::compute_scores(std::span<const AuditExample* const> examples) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (const AuditExample* ex : examples) out.push_back(score_of(*ex));
  return out;
}

std::optional<std::vector<double>> PlantedBiasScorer::reference_scores(const AuditPool& pool) const {
  std::vector<double> out;
  out.reserve(pool.size());
  for (const auto& ex : pool.examples()) out.push_back(score_of(ex));
  return out;
}

std::unique_ptr<PlantedBiasScorer> make_planted_bias_scorer(const PlantedBiasConfig& config) {
  return std::make_unique<PlantedBiasScorer>(config);
}

// ---- TableScorer --------------------------------------------------------

TableScorer::TableScorer(std::unordered_map<std::string, double> table, std::string identity)
    : BlackBoxScorer(std::move(identity), std::nullopt), table_(std::move(table)) {}

std::unique_ptr<TableScorer> TableScorer::from_csv(const std::string& path) {
  return std::make_unique<TableScorer>(read_score_table(path), "table:" + path);
}

std::vector<double> TableScorer::compute_scores(std::span<const AuditExample* const> examples) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (const AuditExample* ex : examples) {
    auto it = table_.find(ex->id);
    if (it == table_.end()) fail(ErrorCode::kMissingScore, ex->id);
    out.push_back(it->second);
  }
  return out;
}

std::optional<std::vector<double>> TableScorer::reference_scores(const AuditPool& pool) const {
  std::vector<double> out;
  out.reserve(pool.size());
  for (const auto& ex : pool.examples()) {
    auto it = table_.find(ex.id);
    if (it == table_.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

}  // namespace activeaudit

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

#ifndef ACTIVEAUDIT_BLACKBOX_H_
#define ACTIVEAUDIT_BLACKBOX_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "activeaudit/pool.h"

namespace activeaudit {

struct ScoreRecord {
  std::string id;
  double score = 0.0;  // finite, within [0, 1]
  bool operator==(const ScoreRecord&) const = default;
};

// Synthetic black box with seeded, group-conditional score corruption:
//   s(x) = sigmoid(base_weights . x + bias + noise_scale * eta(id))
// and s -> 1 - s for ids whose hashed uniform falls below flip_prob_group{g}.
struct PlantedBiasConfig {
  std::vector<double> base_weights;
  double bias = 0.0;
  double flip_prob_group0 = 0.0;
  double flip_prob_group1 = 0.0;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const PlantedBiasConfig&) const = default;
};

void validate(const PlantedBiasConfig& config);
std::string planted_bias_to_json(const PlantedBiasConfig& config);
PlantedBiasConfig planted_bias_from_json(const std::string& text);

// Base class for all black boxes. score_batch serves repeated ids from a
// per-scorer cache so every id reaches compute_scores at most once; the
// distinct ids sent are the audit's query count. Thread-safe.
class BlackBoxScorer {
 public:
  virtual ~BlackBoxScorer() = default;
  BlackBoxScorer(const BlackBoxScorer&) = delete;
  BlackBoxScorer& operator=(const BlackBoxScorer&) = delete;

  std::vector<ScoreRecord> score_batch(std::span<const AuditExample* const> examples);
  std::vector<ScoreRecord> score_batch(std::span<const AuditExample> examples);

  std::size_t distinct_queries() const;
  std::vector<std::string> queried_ids() const;  // first-query order
  std::size_t cache_hits() const;
  const std::string& identity() const { return identity_; }
  std::optional<std::size_t> expected_dimension() const { return dimension_; }

  // Sidecar cache, columns id,score. Loaded entries count as already scored.
  std::string cache_csv() const;
  void save_cache_csv(const std::string& path) const;
  void load_cache_csv(const std::string& path);

  // Ground-truth scores for every pool row, outside the query accounting.
  // Only synthetic and table scorers can provide this.
  virtual std::optional<std::vector<double>> reference_scores(const AuditPool& pool) const;

 protected:
  BlackBoxScorer(std::string identity, std::optional<std::size_t> dimension);
  virtual std::vector<double> compute_scores(std::span<const AuditExample* const> examples) = 0;

 private:
  std::string identity_;
  std::optional<std::size_t> dimension_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, double> cache_;
  std::vector<std::string> sent_;
  std::size_t hits_ = 0;
};

class PlantedBiasScorer : public BlackBoxScorer {
 public:
  explicit PlantedBiasScorer(PlantedBiasConfig config);

  const PlantedBiasConfig& config() const { return config_; }
  double score_of(const AuditExample& example) const;
  bool is_flipped(const AuditExample& example) const;
  std::optional<std::vector<double>> reference_scores(const AuditPool& pool) const override;

 protected:
  std::vector<double> compute_scores(std::span<const AuditExample* const> examples) override;

 private:
  PlantedBiasConfig config_;
};

std::unique_ptr<PlantedBiasScorer> make_planted_bias_scorer(const PlantedBiasConfig& config);

// Reads an "id,score" CSV (the cache format).
std::unordered_map<std::string, double> read_score_table(const std::string& path);

// Pre-computed scores from a CSV with columns id,score.
class TableScorer : public BlackBoxScorer {
 public:
  explicit TableScorer(std::unordered_map<std::string, double> table, std::string identity = "table");
  static std::unique_ptr<TableScorer> from_csv(const std::string& path);

  std::optional<std::vector<double>> reference_scores(const AuditPool& pool) const override;

 protected:
  std::vector<double> compute_scores(std::span<const AuditExample* const> examples) override;

 private:
  std::unordered_map<std::string, double> table_;
};

// ---- Remote scorer wire protocol ---------------------------------------
// POST <endpoint>  {"items":[{"id":str,"features":[f64],"text":str?}]}
// response         {"items":[{"id":str,"score":f64}]}

struct RemoteOptions {
  double timeout_seconds = 30.0;
  std::size_t max_batch = 256;
  int retries = 1;                    // one extra attempt on transport failure
  std::string credential_env = "ACTIVEAUDIT_REMOTE_TOKEN";  // sent as a bearer token when set
};

std::string encode_remote_request(std::span<const AuditExample* const> examples);
// Validates a response body against the requested ids: every id exactly once,
// no extras, scores finite and within [0, 1]. Returns records in request order.
std::vector<ScoreRecord> decode_remote_response(const std::string& body,
                                                std::span<const AuditExample* const> requested);

// One protocol exchange per batch of at most max_batch examples.
std::vector<ScoreRecord> query_remote(const std::string& endpoint, std::span<const AuditExample* const> examples,
                                      const RemoteOptions& options);

class RemoteScorer : public BlackBoxScorer {
 public:
  RemoteScorer(std::string endpoint, RemoteOptions options, std::optional<std::size_t> dimension = std::nullopt);

 protected:
  std::vector<double> compute_scores(std::span<const AuditExample* const> examples) override;

 private:
  std::string endpoint_;
  RemoteOptions options_;
};

// Loopback HTTP server answering the protocol from a fixed id -> score table.
// `responder`, when set, replaces the table lookup (used to inject faults).
class ScoreTableServer {
 public:
  using Responder = std::function<std::string(const std::string& request_body)>;

  explicit ScoreTableServer(std::unordered_map<std::string, double> table, Responder responder = nullptr);
  ~ScoreTableServer();

  // Binds 127.0.0.1 on `port` (0 = any free port) and serves in the background.
  int start(int port = 0, const std::string& path = "/score");
  void stop();
  std::string endpoint() const;
  std::size_t requests_served() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_BLACKBOX_H_

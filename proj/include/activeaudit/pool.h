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

#ifndef ACTIVEAUDIT_POOL_H_
#define ACTIVEAUDIT_POOL_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace activeaudit {

struct AuditExample {
  std::string id;
  std::vector<double> features;
  int group = 0;  // protected attribute, 0 or 1
  int label = 0;  // ground truth, 0 or 1
  std::optional<std::string> text;

  bool operator==(const AuditExample&) const = default;
};

enum class PoolFormat { kCsv, kJsonl };
enum class StratumKey { kGroup, kGroupAndLabel };

// label == -1 when stratifying by group only.
struct Stratum {
  int group = 0;
  int label = -1;
  auto operator<=>(const Stratum&) const = default;
};

std::string to_string(const Stratum& s);

// Immutable audit pool. Example order is ingestion order; ids are unique and
// never reindexed. The feature matrix is stored row-major for the kernels.
class AuditPool {
 public:
  static AuditPool from_examples(std::vector<AuditExample> examples);

  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  std::size_t dimension() const { return dimension_; }

  const std::vector<AuditExample>& examples() const { return examples_; }
  const AuditExample& at(std::size_t row) const { return examples_.at(row); }
  std::optional<std::size_t> row_of(const std::string& id) const;
  std::size_t require_row(const std::string& id) const;  // kMissingScore-free lookup; throws kPrecondition

  std::span<const double> features(std::size_t row) const {
    return {feature_matrix_.data() + row * dimension_, dimension_};
  }
  std::span<const double> feature_matrix() const { return feature_matrix_; }

  // (g, y) -> ids, in ingestion order. Partitions the id set exactly.
  const std::map<Stratum, std::vector<std::string>>& strata_index() const { return strata_index_; }
  // Rows of every member of `s` under `key`, in ingestion order.
  std::vector<std::size_t> stratum_rows(const Stratum& s) const;
  Stratum stratum_of(std::size_t row, StratumKey key) const;

  bool operator==(const AuditPool& other) const { return examples_ == other.examples_; }

 private:
  std::vector<AuditExample> examples_;
  std::size_t dimension_ = 0;
  std::vector<double> feature_matrix_;
  std::unordered_map<std::string, std::size_t> row_by_id_;
  std::map<Stratum, std::vector<std::string>> strata_index_;
  std::map<Stratum, std::vector<std::size_t>> strata_rows_;
};

AuditPool load_pool(const std::string& path, PoolFormat format);
PoolFormat pool_format_from_path(const std::string& path);

// CSV columns: id,group,label,f0..f{d-1}[,text]. Doubles are written in
// shortest round-trip form so a reload is bit-exact.
std::string pool_to_csv(const AuditPool& pool);
std::string pool_to_jsonl(const AuditPool& pool);
void write_pool(const AuditPool& pool, const std::string& path, PoolFormat format);

std::map<Stratum, double> stratum_proportions(const AuditPool& pool, StratumKey key);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_POOL_H_

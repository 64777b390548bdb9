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

#include "activeaudit/pool.h"

#include <cmath>
#include <sstream>

#include "activeaudit/csv.h"
#include "activeaudit/errors.h"
#include "json.hpp"

namespace activeaudit {

std::string to_string(const Stratum& s) {
  std::string out = "g" + std::to_string(s.group);
  if (s.label >= 0) out += "y" + std::to_string(s.label);
  return out;
}

AuditPool AuditPool::from_examples(std::vector<AuditExample> examples) {
  AuditPool pool;
  if (!examples.empty()) pool.dimension_ = examples.front().features.size();
  pool.feature_matrix_.reserve(examples.size() * pool.dimension_);
  for (std::size_t row = 0; row < examples.size(); ++row) {
    const AuditExample& ex = examples[row];
    if (ex.features.size() != pool.dimension_) {
      fail(ErrorCode::kInconsistentDimension, "row " + std::to_string(row + 1));
    }
    if (ex.group != 0 && ex.group != 1) {
      fail(ErrorCode::kNonBinaryField, "row " + std::to_string(row + 1) + ", group");
    }
    if (ex.label != 0 && ex.label != 1) {
      fail(ErrorCode::kNonBinaryField, "row " + std::to_string(row + 1) + ", label");
    }
    for (double f : ex.features) {
      if (!std::isfinite(f)) {
        fail(ErrorCode::kParseError, "row " + std::to_string(row + 1) + ": non-finite feature");
      }
    }
    if (!pool.row_by_id_.emplace(ex.id, row).second) fail(ErrorCode::kDuplicateId, ex.id);
    pool.feature_matrix_.insert(pool.feature_matrix_.end(), ex.features.begin(), ex.features.end());
    const Stratum cell{ex.group, ex.label};
    pool.strata_index_[cell].push_back(ex.id);
    pool.strata_rows_[cell].push_back(row);
    pool.strata_rows_[Stratum{ex.group, -1}].push_back(row);
  }
  pool.examples_ = std::move(examples);
  return pool;
}

std::optional<std::size_t> AuditPool::row_of(const std::string& id) const {
  auto it = row_by_id_.find(id);
  if (it == row_by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t AuditPool::require_row(const std::string& id) const {
  auto row = row_of(id);
  if (!row) fail(ErrorCode::kPrecondition, "id not in pool: " + id);
  return *row;
}

std::vector<std::size_t> AuditPool::stratum_rows(const Stratum& s) const {
  auto it = strata_rows_.find(s);
  if (it == strata_rows_.end()) return {};
  return it->second;
}

Stratum AuditPool::stratum_of(std::size_t row, StratumKey key) const {
  const AuditExample& ex = examples_[row];
  return key == StratumKey::kGroup ? Stratum{ex.group, -1} : Stratum{ex.group, ex.label};
}

namespace {

int parse_binary(std::string_view text, std::size_t line, const char* field) {
  auto v = parse_int(text);
  if (!v) fail(ErrorCode::kParseError, "line " + std::to_string(line) + ": bad " + field);
  if (*v != 0 && *v != 1) {
    fail(ErrorCode::kNonBinaryField, "row " + std::to_string(line) + ", " + field);
  }
  return static_cast<int>(*v);
}

std::vector<AuditExample> parse_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) fail(ErrorCode::kParseError, "line 1: missing header");
  auto header = csv_split(lines[0]);
  if (!header || header->size() < 3 || (*header)[0] != "id" || (*header)[1] != "group" ||
      (*header)[2] != "label") {
    fail(ErrorCode::kParseError, "line 1: header must start with id,group,label");
  }
  std::size_t d = 0;
  while (3 + d < header->size() && (*header)[3 + d] == "f" + std::to_string(d)) ++d;
  const bool has_text = header->size() == 4 + d && header->back() == "text";
  if (header->size() != 3 + d + (has_text ? 1 : 0)) {
    fail(ErrorCode::kParseError, "line 1: unexpected column layout");
  }

  std::vector<AuditExample> out;
  std::size_t i = 1;
  while (i < lines.size()) {
    const std::size_t line_no = i + 1;
    std::string record = lines[i++];
    if (record.empty()) continue;
    auto fields = csv_split(record);
    // Quoted text may span lines.
    while (!fields && i < lines.size()) {
      record += "\n" + lines[i++];
      fields = csv_split(record);
    }
    if (!fields) fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": unterminated quote");
    const std::size_t expected = 3 + d + (has_text ? 1 : 0);
    if (fields->size() != expected) {
      if (fields->size() + (has_text ? 1 : 0) == expected && has_text) {
        fields->emplace_back();  // text column omitted on this row
      } else {
        fail(ErrorCode::kInconsistentDimension, "row " + std::to_string(line_no));
      }
    }
    AuditExample ex;
    ex.id = (*fields)[0];
    if (ex.id.empty()) fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": empty id");
    ex.group = parse_binary((*fields)[1], line_no, "group");
    ex.label = parse_binary((*fields)[2], line_no, "label");
    ex.features.reserve(d);
    for (std::size_t f = 0; f < d; ++f) {
      auto v = parse_double((*fields)[3 + f]);
      if (!v || !std::isfinite(*v)) {
        fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad feature f" + std::to_string(f));
      }
      ex.features.push_back(*v);
    }
    if (has_text && !(*fields)[3 + d].empty()) ex.text = (*fields)[3 + d];
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<AuditExample> parse_jsonl(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<AuditExample> out;
  std::size_t dim = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::kParseError, "line " + std::to_string(line_no));
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("group") || !j.contains("label") ||
        !j.contains("features") || !j["id"].is_string() || !j["features"].is_array()) {
      fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": missing field");
    }
    AuditExample ex;
    ex.id = j["id"].get<std::string>();
    for (const char* field : {"group", "label"}) {
      const auto& v = j[field];
      if (!v.is_number_integer()) {
        fail(ErrorCode::kNonBinaryField, "row " + std::to_string(line_no) + ", " + field);
      }
      const auto value = v.get<long long>();
      if (value != 0 && value != 1) {
        fail(ErrorCode::kNonBinaryField, "row " + std::to_string(line_no) + ", " + field);
      }
      (std::string_view(field) == "group" ? ex.group : ex.label) = static_cast<int>(value);
    }
    for (const auto& f : j["features"]) {
      if (!f.is_number()) fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad feature");
      ex.features.push_back(f.get<double>());
    }
    if (out.empty()) dim = ex.features.size();
    if (ex.features.size() != dim) fail(ErrorCode::kInconsistentDimension, "row " + std::to_string(line_no));
    if (j.contains("text") && j["text"].is_string()) ex.text = j["text"].get<std::string>();
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

AuditPool load_pool(const std::string& path, PoolFormat format) {
  return AuditPool::from_examples(format == PoolFormat::kCsv ? parse_csv(path) : parse_jsonl(path));
}

PoolFormat pool_format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && (path.substr(dot) == ".jsonl" || path.substr(dot) == ".json")) {
    return PoolFormat::kJsonl;
  }
  return PoolFormat::kCsv;
}

std::string pool_to_csv(const AuditPool& pool) {
  bool any_text = false;
  for (const auto& ex : pool.examples()) any_text |= ex.text.has_value();
  std::vector<std::string> header = {"id", "group", "label"};
  for (std::size_t f = 0; f < pool.dimension(); ++f) header.push_back("f" + std::to_string(f));
  if (any_text) header.push_back("text");
  std::string out = csv_join(header) + "\n";
  for (const auto& ex : pool.examples()) {
    std::vector<std::string> row = {ex.id, std::to_string(ex.group), std::to_string(ex.label)};
    for (double f : ex.features) row.push_back(format_double(f));
    if (any_text) row.push_back(ex.text.value_or(""));
    out += csv_join(row) + "\n";
  }
  return out;
}

std::string pool_to_jsonl(const AuditPool& pool) {
  std::string out;
  for (const auto& ex : pool.examples()) {
    nlohmann::ordered_json j;
    j["id"] = ex.id;
    j["group"] = ex.group;
    j["label"] = ex.label;
    j["features"] = ex.features;
    if (ex.text) j["text"] = *ex.text;
    out += j.dump() + "\n";
  }
  return out;
}

void write_pool(const AuditPool& pool, const std::string& path, PoolFormat format) {
  write_text_file(path, format == PoolFormat::kCsv ? pool_to_csv(pool) : pool_to_jsonl(pool));
}

std::map<Stratum, double> stratum_proportions(const AuditPool& pool, StratumKey key) {
  if (pool.empty()) fail(ErrorCode::kEmptyPool, "stratum_proportions");
  std::map<Stratum, std::size_t> counts;
  for (std::size_t row = 0; row < pool.size(); ++row) ++counts[pool.stratum_of(row, key)];
  std::map<Stratum, double> out;
  const double n = static_cast<double>(pool.size());
  for (const auto& [s, c] : counts) out[s] = static_cast<double>(c) / n;
  return out;
}

}  // namespace activeaudit

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

#ifndef ACTIVEAUDIT_CSV_H_
#define ACTIVEAUDIT_CSV_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace activeaudit {

// Shortest round-trip decimal form; parse_double(format_double(x)) == x.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

// RFC 4180 style: fields containing a comma, quote or newline are quoted.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

// Splits one record; quoted fields may contain commas and doubled quotes.
// Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> csv_split(std::string_view line);

// Reads LF (or CRLF) separated lines; a trailing empty line is dropped.
std::vector<std::string> read_lines(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace activeaudit

#endif  // ACTIVEAUDIT_CSV_H_

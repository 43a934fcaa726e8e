// Copyright 2026 The optperf Authors
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

#ifndef OPTPERF_COMMON_CSV_H_
#define OPTPERF_COMMON_CSV_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace optperf::csv {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// RFC 4180 quoting: fields containing a comma, quote or newline are quoted.
std::string Escape(std::string_view field);
std::string JoinRow(const std::vector<std::string>& fields);
void WriteRow(std::ostream& out, const std::vector<std::string>& fields);

std::vector<std::string> SplitRow(std::string_view line);

// Writes header and rows; throws CsvError when the file cannot be written.
void WriteFile(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// A parsed CSV file with a header row. Rows shorter than the header are
// padded with empty strings.
class Table {
 public:
  static Table Parse(std::string_view text);
  static Table ReadFile(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<std::string>& row(size_t i) const { return rows_[i]; }

  bool has_column(std::string_view name) const;
  // Value of `column` in row `i`; throws CsvError if the column is unknown.
  const std::string& at(size_t i, std::string_view column) const;
  std::optional<std::string> get(size_t i, std::string_view column) const;

 private:
  std::vector<std::string> header_;
  std::unordered_map<std::string, size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace optperf::csv

#endif  // OPTPERF_COMMON_CSV_H_

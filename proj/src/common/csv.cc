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

#include "optperf/common/csv.h"

#include <fstream>
#include <sstream>

namespace optperf::csv {

std::string Escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string JoinRow(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += Escape(fields[i]);
  }
  return out;
}

void WriteRow(std::ostream& out, const std::vector<std::string>& fields) {
  out << JoinRow(fields) << '\n';
}

std::vector<std::string> SplitRow(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

// Splits on newlines that are not inside a quoted field.
std::vector<std::string_view> SplitRecords(std::string_view text) {
  std::vector<std::string_view> records;
  bool quoted = false;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '"') quoted = !quoted;
    if (text[i] == '\n' && !quoted) {
      records.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) records.push_back(text.substr(start));
  return records;
}

}  // namespace

Table Table::Parse(std::string_view text) {
  Table t;
  bool first = true;
  for (std::string_view rec : SplitRecords(text)) {
    if (!rec.empty() && rec.back() == '\r') rec.remove_suffix(1);
    if (rec.empty()) continue;
    auto fields = SplitRow(rec);
    if (first) {
      t.header_ = std::move(fields);
      for (size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
      first = false;
      continue;
    }
    fields.resize(std::max(fields.size(), t.header_.size()));
    t.rows_.push_back(std::move(fields));
  }
  return t;
}

Table Table::ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

bool Table::has_column(std::string_view name) const {
  return index_.contains(std::string(name));
}

const std::string& Table::at(size_t i, std::string_view column) const {
  auto it = index_.find(std::string(column));
  if (it == index_.end()) {
    throw CsvError("missing column '" + std::string(column) + "'");
  }
  return rows_.at(i)[it->second];
}

std::optional<std::string> Table::get(size_t i, std::string_view column) const {
  auto it = index_.find(std::string(column));
  if (it == index_.end()) return std::nullopt;
  return rows_.at(i)[it->second];
}

void WriteFile(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot write " + path.string());
  WriteRow(out, header);
  for (const auto& r : rows) WriteRow(out, r);
  out.flush();
  if (!out) throw CsvError("write failed for " + path.string());
}

}  // namespace optperf::csv

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

#include "optperf/crawler/crawl_target.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>

#include "optperf/common/csv.h"

namespace optperf::crawler {

const char* ToString(SizeSource s) {
  return s == SizeSource::kContentLength ? "ContentLength" : "PartialDownload";
}

const std::vector<std::string>& CrawlTargetCsvHeader() {
  static const std::vector<std::string> h = {"domain", "file_url", "size_estimate", "size_source",
                                             "resolved_ip"};
  return h;
}

std::vector<CrawlTarget> ReadCrawlTargets(const std::filesystem::path& path) {
  const auto t = csv::Table::ReadFile(path);
  std::vector<CrawlTarget> out;
  for (size_t i = 0; i < t.size(); ++i) {
    CrawlTarget c;
    c.domain = t.at(i, "domain");
    c.file_url = t.at(i, "file_url");
    const std::string& size = t.at(i, "size_estimate");
    const auto [p, ec] = std::from_chars(size.data(), size.data() + size.size(), c.size_estimate);
    if (ec != std::errc() || p != size.data() + size.size()) {
      throw csv::CsvError(path.string() + ": bad size_estimate '" + size + "'");
    }
    const std::string& src = t.at(i, "size_source");
    if (src == "ContentLength") {
      c.size_source = SizeSource::kContentLength;
    } else if (src == "PartialDownload") {
      c.size_source = SizeSource::kPartialDownload;
    } else {
      throw csv::CsvError(path.string() + ": bad size_source '" + src + "'");
    }
    c.resolved_ip = t.get(i, "resolved_ip").value_or("");
    out.push_back(std::move(c));
  }
  return out;
}

void WriteCrawlTargets(const std::filesystem::path& path, const std::vector<CrawlTarget>& targets) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : targets) {
    rows.push_back({c.domain, c.file_url, std::to_string(c.size_estimate), ToString(c.size_source),
                    c.resolved_ip});
  }
  csv::WriteFile(path, CrawlTargetCsvHeader(), rows);
}

std::vector<std::string> ReadDomainList(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read domain list " + path.string());
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (const size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string d;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        d += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    while (!d.empty() && d.back() == '.') d.pop_back();
    if (!d.empty() && seen.insert(d).second) out.push_back(d);
  }
  return out;
}

}  // namespace optperf::crawler

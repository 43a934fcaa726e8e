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

#ifndef OPTPERF_CRAWLER_CRAWL_TARGET_H_
#define OPTPERF_CRAWLER_CRAWL_TARGET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace optperf::crawler {

enum class SizeSource { kContentLength, kPartialDownload };
const char* ToString(SizeSource s);

struct CrawlTarget {
  std::string domain;
  std::string file_url;
  uint64_t size_estimate = 0;
  SizeSource size_source = SizeSource::kContentLength;
  std::string resolved_ip;
};

// domain,file_url,size_estimate,size_source,resolved_ip
const std::vector<std::string>& CrawlTargetCsvHeader();
std::vector<CrawlTarget> ReadCrawlTargets(const std::filesystem::path& path);
void WriteCrawlTargets(const std::filesystem::path& path, const std::vector<CrawlTarget>& targets);

// Newline-delimited list; blank lines and '#' comments are skipped,
// entries lower-cased and de-duplicated in order.
std::vector<std::string> ReadDomainList(const std::filesystem::path& path);

}  // namespace optperf::crawler

#endif  // OPTPERF_CRAWLER_CRAWL_TARGET_H_

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

#ifndef OPTPERF_CRAWLER_CRAWLER_H_
#define OPTPERF_CRAWLER_CRAWLER_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optperf/crawler/crawl_target.h"
#include "optperf/crawler/robots.h"
#include "optperf/net/http_client.h"
#include "optperf/net/resolver.h"

namespace optperf::crawler {

struct CrawlOptions {
  int max_depth = 3;
  int max_pages = 200;
  uint64_t min_size = 1'000'000;
  // Bytes a size probe may read beyond min_size.
  uint64_t probe_slack = 256 * 1024;
  int max_redirects = 5;
  // HTML pages larger than this are truncated before link extraction.
  uint64_t max_page_bytes = 5 << 20;
  // Pause between requests to the same domain; robots Crawl-delay wins
  // when larger.
  std::chrono::milliseconds request_gap{0};
  std::chrono::seconds same_ip_cache{60};
  net::FetchOptions fetch;
};

class HttpStatusError : public std::runtime_error {
 public:
  HttpStatusError(int status, const std::string& what) : std::runtime_error(what), status(status) {}
  int status;
};

class FetchFailed : public std::runtime_error {
 public:
  FetchFailed(net::FetchError error, const std::string& what)
      : std::runtime_error(what), error(error) {}
  net::FetchError error;
};

// Strict decimal Content-Length; nullopt when absent or malformed.
std::optional<uint64_t> ParseContentLength(const std::optional<std::string>& value);

// HEAD request. Throws HttpStatusError for status >= 400 and FetchFailed
// when the request did not complete.
std::optional<uint64_t> HeadContentLength(const net::Url& url, const std::optional<IpAddress>& ip,
                                          const net::FetchOptions& fetch);

struct SizeProbe {
  bool qualified = false;
  uint64_t bytes = 0;
  std::string reason;  // why it did not qualify
};

// Streams the body and stops as soon as min_size bytes arrived.
SizeProbe FallbackSizeProbe(const net::Url& url, const std::optional<IpAddress>& ip,
                            uint64_t min_size, const net::FetchOptions& fetch);

enum class CrawlStatus { kFound, kNotFound, kError };
const char* ToString(CrawlStatus s);

struct CrawlResult {
  std::string domain;
  CrawlStatus status = CrawlStatus::kNotFound;
  std::optional<CrawlTarget> target;
  std::string reason;
  int pages_visited = 0;
  int robots_excluded = 0;
};

class Crawler {
 public:
  Crawler(CrawlOptions opts, net::Resolver& resolver) : opts_(std::move(opts)), resolver_(resolver) {}

  CrawlResult CrawlDomain(const std::string& domain) const;
  // Up to `concurrency` domains at a time, one request in flight per
  // domain. Results follow input order.
  std::vector<CrawlResult> CrawlDomains(const std::vector<std::string>& domains,
                                        size_t concurrency) const;

 private:
  CrawlOptions opts_;
  net::Resolver& resolver_;
};

// domain,status,reason,pages_visited,robots_excluded for every domain
// without a target.
void WriteCrawlReport(const std::filesystem::path& path, const std::vector<CrawlResult>& results);

}  // namespace optperf::crawler

#endif  // OPTPERF_CRAWLER_CRAWLER_H_

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

#include "optperf/crawler/crawler.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <deque>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "optperf/common/csv.h"
#include "optperf/crawler/links.h"

namespace optperf::crawler {
namespace {

using net::FetchError;
using net::Url;

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

constexpr int kProbeReceiveBuffer = 64 * 1024;

bool IsHtml(const std::optional<std::string>& content_type) {
  if (!content_type) return false;
  const std::string ct = Lower(*content_type);
  return ct.rfind("text/html", 0) == 0 || ct.rfind("application/xhtml+xml", 0) == 0;
}

bool IsRedirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

std::string Describe(const net::FetchResult& r) {
  return std::string(net::ToString(r.error)) + (r.error_detail.empty() ? "" : ": " + r.error_detail);
}

// Errors that say the domain as a whole is unreachable.
bool IsDomainLevel(FetchError e) {
  return e == FetchError::kConnect || e == FetchError::kCertificate || e == FetchError::kTimeout;
}

struct NonOwning {
  void operator()(net::Resolver*) const {}
};

class DomainCrawl {
 public:
  DomainCrawl(const CrawlOptions& opts, net::Resolver& resolver, const std::string& domain)
      : opts_(opts),
        resolver_(std::shared_ptr<net::Resolver>(&resolver, NonOwning{}), opts.same_ip_cache),
        domain_(Lower(domain)) {}

  CrawlResult Run() {
    result_.domain = domain_;
    try {
      const auto addrs = resolver_.Resolve(domain_);
      if (addrs.empty()) throw net::ResolveError("no addresses");
      ip_ = net::PreferV4(addrs);
    } catch (const net::ResolveError& e) {
      return Error(std::string("resolve: ") + e.what());
    }
    const auto index = Url::Parse("https://" + domain_ + "/");
    if (!index) return Error("not a valid host name");
    if (!LoadRobots(*index)) return result_;

    std::deque<std::pair<Url, int>> queue{{*index, 0}};
    seen_.insert(index->ToString());
    while (!queue.empty() && result_.pages_visited < opts_.max_pages) {
      auto [url, depth] = queue.front();
      queue.pop_front();
      if (Visit(url, depth, queue)) return result_;
      if (result_.status == CrawlStatus::kError) return result_;
    }
    result_.status = CrawlStatus::kNotFound;
    result_.reason = "no file of at least " + std::to_string(opts_.min_size) + " bytes within depth " +
                     std::to_string(opts_.max_depth) + " and " + std::to_string(opts_.max_pages) +
                     " pages (" + std::to_string(result_.pages_visited) + " visited)";
    return result_;
  }

 private:
  CrawlResult Error(const std::string& reason) {
    result_.status = CrawlStatus::kError;
    result_.reason = reason;
    return result_;
  }

  void Pace() {
    auto gap = opts_.request_gap;
    if (robots_.crawl_delay()) {
      gap = std::max(gap, std::chrono::milliseconds(static_cast<int64_t>(*robots_.crawl_delay() * 1000)));
    }
    if (gap.count() > 0 && last_request_) {
      std::this_thread::sleep_until(*last_request_ + gap);
    }
    last_request_ = std::chrono::steady_clock::now();
  }

  net::FetchResult Request(const std::string& method, const Url& url,
                           const net::BodySink& sink = nullptr) {
    Pace();
    return net::Fetch(method, url, ip_, opts_.fetch, sink);
  }

  bool LoadRobots(const Url& index) {
    const auto url = *index.Resolve("/robots.txt");
    std::string body;
    const auto r = Request("GET", url, [&](const char* d, size_t n) {
      body.append(d, std::min<size_t>(n, 512 * 1024 - std::min<size_t>(body.size(), 512 * 1024)));
      return body.size() < 512 * 1024;
    });
    if (r.error != FetchError::kNone && r.error != FetchError::kAborted) {
      Error("robots.txt: " + Describe(r));
      return false;
    }
    if (r.status >= 200 && r.status < 300) {
      robots_ = RobotsRules::Parse(body, ProductToken(opts_.fetch.user_agent));
    } else if (r.status >= 500) {
      // Unreachable robots.txt means a full disallow.
      robots_ = RobotsRules::DisallowAll();
    } else {
      robots_ = RobotsRules::AllowAll();
    }
    return true;
  }

  bool Permitted(const Url& url) {
    if (url.scheme != "https" || Lower(url.host) != domain_ || url.port != url.default_port()) {
      return false;
    }
    if (!robots_.IsAllowed(url.path)) {
      ++result_.robots_excluded;
      return false;
    }
    try {
      const auto now = resolver_.Resolve(url.host);
      if (now.empty() || net::PreferV4(now) != ip_) return false;
    } catch (const net::ResolveError&) {
      return false;
    }
    return true;
  }

  // Returns true when a qualifying file was found.
  bool Visit(Url url, int depth, std::deque<std::pair<Url, int>>& queue) {
    if (!Permitted(url)) return false;
    ++result_.pages_visited;
    net::FetchResult head;
    for (int hop = 0;; ++hop) {
      head = Request("HEAD", url);
      if (head.error != FetchError::kNone) {
        if (depth == 0 && IsDomainLevel(head.error)) Error("index: " + Describe(head));
        return false;
      }
      if (!IsRedirect(head.status)) break;
      const auto location = head.header("location");
      const auto next = location ? url.Resolve(*location) : std::nullopt;
      if (hop >= opts_.max_redirects || !next || !Permitted(*next) ||
          !seen_.insert(next->ToString()).second) {
        return false;
      }
      url = *next;
    }
    if (head.status >= 400 || head.status < 200) return false;
    const auto length = ParseContentLength(head.header("content-length"));
    if (length && *length >= opts_.min_size) return Found(url, *length, SizeSource::kContentLength);
    if (IsHtml(head.header("content-type"))) {
      if (depth < opts_.max_depth) Expand(url, depth, queue);
      return false;
    }
    if (length) return false;
    const auto probe = Probe(url);
    if (probe.qualified) return Found(url, probe.bytes, SizeSource::kPartialDownload);
    return false;
  }

  SizeProbe Probe(const Url& url) {
    Pace();
    return FallbackSizeProbe(url, ip_, opts_.min_size, opts_.fetch);
  }

  void Expand(const Url& url, int depth, std::deque<std::pair<Url, int>>& queue) {
    std::string body;
    const uint64_t cap = opts_.max_page_bytes;
    const auto r = Request("GET", url, [&](const char* d, size_t n) {
      body.append(d, std::min<uint64_t>(n, cap - std::min<uint64_t>(body.size(), cap)));
      return body.size() < cap;
    });
    if ((r.error != FetchError::kNone && r.error != FetchError::kAborted) || r.status != 200) return;
    for (const auto& href : ExtractLinks(body)) {
      const auto next = url.Resolve(href);
      if (!next || next->scheme != "https" || Lower(next->host) != domain_) continue;
      if (!seen_.insert(next->ToString()).second) continue;
      queue.emplace_back(*next, depth + 1);
    }
  }

  bool Found(const Url& url, uint64_t size, SizeSource source) {
    CrawlTarget t;
    t.domain = domain_;
    t.file_url = url.ToString();
    t.size_estimate = size;
    t.size_source = source;
    t.resolved_ip = ip_.ToString();
    result_.target = t;
    result_.status = CrawlStatus::kFound;
    result_.reason.clear();
    return true;
  }

  const CrawlOptions& opts_;
  net::CachingResolver resolver_;
  std::string domain_;
  IpAddress ip_;
  RobotsRules robots_;
  std::set<std::string> seen_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
  CrawlResult result_;
};

}  // namespace

const char* ToString(CrawlStatus s) {
  switch (s) {
    case CrawlStatus::kFound: return "Found";
    case CrawlStatus::kNotFound: return "NotFound";
    case CrawlStatus::kError: return "Error";
  }
  return "Error";
}

std::optional<uint64_t> ParseContentLength(const std::optional<std::string>& value) {
  if (!value) return std::nullopt;
  std::string_view v = *value;
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  uint64_t n = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc()) return std::nullopt;
  return n;
}

std::optional<uint64_t> HeadContentLength(const Url& url, const std::optional<IpAddress>& ip,
                                          const net::FetchOptions& fetch) {
  const auto r = net::Fetch("HEAD", url, ip, fetch);
  if (r.error != FetchError::kNone) throw FetchFailed(r.error, url.ToString() + ": " + Describe(r));
  if (r.status >= 400) {
    throw HttpStatusError(r.status, url.ToString() + ": HTTP " + std::to_string(r.status));
  }
  return ParseContentLength(r.header("content-length"));
}

SizeProbe FallbackSizeProbe(const Url& url, const std::optional<IpAddress>& ip, uint64_t min_size,
                            const net::FetchOptions& fetch) {
  SizeProbe out;
  net::FetchOptions bounded = fetch;
  if (bounded.receive_buffer == 0) bounded.receive_buffer = kProbeReceiveBuffer;
  const auto r = net::Fetch("GET", url, ip, bounded, [&](const char*, size_t n) {
    out.bytes += n;
    return out.bytes < min_size;
  });
  if (r.status != 0 && (r.status < 200 || r.status >= 300)) {
    out.reason = "HTTP " + std::to_string(r.status);
    return out;
  }
  out.qualified = out.bytes >= min_size &&
                  (r.error == FetchError::kNone || r.error == FetchError::kAborted);
  if (!out.qualified) {
    out.reason = r.error == FetchError::kNone
                     ? "body ended after " + std::to_string(out.bytes) + " bytes"
                     : Describe(r) + " after " + std::to_string(out.bytes) + " bytes";
  }
  return out;
}

CrawlResult Crawler::CrawlDomain(const std::string& domain) const {
  auto r = DomainCrawl(opts_, resolver_, domain).Run();
  spdlog::debug("crawl {}: {} {}", r.domain, ToString(r.status), r.reason);
  return r;
}

std::vector<CrawlResult> Crawler::CrawlDomains(const std::vector<std::string>& domains,
                                               size_t concurrency) const {
  std::vector<CrawlResult> results(domains.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < domains.size();) results[i] = CrawlDomain(domains[i]);
  };
  std::vector<std::thread> threads;
  const size_t n = std::clamp<size_t>(concurrency, 1, std::max<size_t>(domains.size(), 1));
  for (size_t i = 1; i < n; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return results;
}

void WriteCrawlReport(const std::filesystem::path& path, const std::vector<CrawlResult>& results) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : results) {
    if (r.status == CrawlStatus::kFound) continue;
    rows.push_back({r.domain, ToString(r.status), r.reason, std::to_string(r.pages_visited),
                    std::to_string(r.robots_excluded)});
  }
  csv::WriteFile(path, {"domain", "status", "reason", "pages_visited", "robots_excluded"}, rows);
}

}  // namespace optperf::crawler

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

#ifndef OPTPERF_ORCHESTRATOR_DOWNLOAD_H_
#define OPTPERF_ORCHESTRATOR_DOWNLOAD_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "optperf/common/ip_address.h"
#include "optperf/net/http_client.h"
#include "optperf/net/url.h"

namespace optperf::orchestrator {

enum class Outcome { kOk, kDnsFail, kConnectFail, kIncomplete, kBlocked };
const char* ToString(Outcome o);
std::optional<Outcome> ParseOutcome(const std::string& s);

struct DownloadResult {
  Outcome outcome = Outcome::kOk;
  std::string reason;  // empty for kOk
  int http_status = 0;
  uint64_t bytes = 0;
  std::string content_type;
};

// Content types that a challenge or error page would use rather than the
// crawled file.
bool IsPageContentType(const std::string& content_type);

// Maps a finished fetch to a download outcome: certificate and connection
// errors are kConnectFail; 403/503 with a page content type is kBlocked;
// other HTTP statuses outside 2xx, timeouts, broken transfers and short
// bodies are kIncomplete.
DownloadResult ClassifyFetch(const net::FetchResult& fetch);

// HTTPS GET of `url` over a TCP connection to `ip`, presenting url.host for
// SNI, certificate validation and the Host header. The body is discarded.
DownloadResult ForcedIpDownload(const net::Url& url, const IpAddress& ip,
                                const net::FetchOptions& options);

// External QUIC client behind a command template. Placeholders: {url},
// {ip}, {host}, {port}, {output}. The template is split on whitespace
// before substitution, so no shell is involved.
struct QuicAdapter {
  std::string id;
  std::string command_template;
};

// Parses "id=template".
QuicAdapter ParseQuicAdapter(const std::string& spec);

// Runs the adapter and waits at most `timeout`. Exit status 0 with a
// non-empty output file is kOk; a non-zero exit with no output is
// kConnectFail; everything else kIncomplete. Throws std::runtime_error if
// the executable cannot be started.
DownloadResult RunQuicAdapter(const QuicAdapter& adapter, const net::Url& url,
                              const IpAddress& ip, const std::filesystem::path& output,
                              std::chrono::milliseconds timeout);

}  // namespace optperf::orchestrator

#endif  // OPTPERF_ORCHESTRATOR_DOWNLOAD_H_

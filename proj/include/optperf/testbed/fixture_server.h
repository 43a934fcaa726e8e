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

#ifndef OPTPERF_TESTBED_FIXTURE_SERVER_H_
#define OPTPERF_TESTBED_FIXTURE_SERVER_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace optperf::testbed {

struct FixtureResource {
  int status = 200;
  std::string content_type = "application/octet-stream";
  // Literal body; when empty, `size` generated bytes are served instead.
  std::string body;
  size_t size = 0;
  // false: chunked transfer encoding without a Content-Length header.
  bool declare_length = true;
  // Close the connection after this many body bytes.
  size_t drop_after = std::numeric_limits<size_t>::max();
  // Extra response headers, e.g. Location for redirects.
  std::map<std::string, std::string> headers;
};

struct AccessLogEntry {
  std::string method;
  std::string host;
  std::string path;
  std::string user_agent;
  int status = 0;
  uint64_t body_bytes_sent = 0;
};

// HTTPS server for fixture sites, virtual-hosted by the Host header.
class FixtureServer {
 public:
  FixtureServer(const std::filesystem::path& cert, const std::filesystem::path& key);
  ~FixtureServer();
  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  // `host` "*" matches any Host header.
  void Add(const std::string& host, const std::string& path, FixtureResource resource);

  // Binds in the calling thread's network namespace and serves on a
  // background thread.
  void Listen(const std::string& address, int port);
  void Stop();

  std::vector<AccessLogEntry> log() const;
  void ClearLog();

  // Deterministic content byte at `offset` of a generated body.
  static uint8_t ContentByte(size_t offset) { return static_cast<uint8_t>(offset % 251); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace optperf::testbed

#endif  // OPTPERF_TESTBED_FIXTURE_SERVER_H_

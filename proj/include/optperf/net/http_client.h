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

#ifndef OPTPERF_NET_HTTP_CLIENT_H_
#define OPTPERF_NET_HTTP_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "optperf/common/ip_address.h"
#include "optperf/net/url.h"

namespace optperf::net {

struct FetchOptions {
  std::string user_agent;
  std::chrono::milliseconds connect_timeout{10'000};
  // Whole-transfer limit; exceeded transfers are aborted with kTimeout.
  std::chrono::milliseconds timeout{300'000};
  // PEM bundle for server verification; empty uses the system store.
  std::string ca_file;
  bool verify_certificate = true;
  // SO_RCVBUF for the connection; 0 keeps the kernel's autotuning. A small
  // buffer bounds how far the sender can run ahead of an early abort.
  int receive_buffer = 0;
};

enum class FetchError {
  kNone,
  kConnect,      // TCP connect or TLS handshake failed
  kCertificate,  // certificate chain or hostname did not verify
  kTimeout,
  kTransfer,     // connection broke while reading
  kAborted,      // the body callback asked to stop
};

const char* ToString(FetchError e);

struct FetchResult {
  FetchError error = FetchError::kNone;
  std::string error_detail;
  int status = 0;
  // Header names lower-cased; the last value wins.
  std::map<std::string, std::string> headers;
  uint64_t body_bytes = 0;
  std::chrono::steady_clock::duration elapsed{};

  std::optional<std::string> header(const std::string& lower_name) const;
};

// Receives body bytes; return false to stop the transfer.
using BodySink = std::function<bool(const char* data, size_t len)>;

// One request to `url`. With `ip`, the TCP connection goes to that address
// while TLS (SNI and certificate check) and the Host header use url.host.
// Redirects are not followed.
FetchResult Fetch(const std::string& method, const Url& url, const std::optional<IpAddress>& ip,
                  const FetchOptions& options, const BodySink& sink = nullptr);

}  // namespace optperf::net

#endif  // OPTPERF_NET_HTTP_CLIENT_H_

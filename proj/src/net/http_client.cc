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

#include "optperf/net/http_client.h"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <sys/socket.h>

#include <cctype>
#include <memory>

namespace optperf::net {
namespace {

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

FetchError Classify(httplib::Error e, long verify_result) {
  switch (e) {
    case httplib::Error::Success: return FetchError::kNone;
    case httplib::Error::SSLServerVerification: return FetchError::kCertificate;
    case httplib::Error::Canceled: return FetchError::kAborted;
    case httplib::Error::ConnectionTimeout: return FetchError::kTimeout;
    case httplib::Error::Read:
    case httplib::Error::Write: return FetchError::kTransfer;
    case httplib::Error::SSLConnection:
      return verify_result != X509_V_OK ? FetchError::kCertificate : FetchError::kConnect;
    default: return FetchError::kConnect;
  }
}

std::unique_ptr<httplib::ClientImpl> MakeClient(const Url& url, const FetchOptions& o) {
  if (url.scheme == "https") {
    auto c = std::make_unique<httplib::SSLClient>(url.host, url.port);
    c->enable_server_certificate_verification(o.verify_certificate);
    if (!o.ca_file.empty()) c->set_ca_cert_path(o.ca_file.c_str());
    return c;
  }
  return std::make_unique<httplib::ClientImpl>(url.host, url.port);
}

}  // namespace

const char* ToString(FetchError e) {
  switch (e) {
    case FetchError::kNone: return "none";
    case FetchError::kConnect: return "connect";
    case FetchError::kCertificate: return "certificate";
    case FetchError::kTimeout: return "timeout";
    case FetchError::kTransfer: return "transfer";
    case FetchError::kAborted: return "aborted";
  }
  return "unknown";
}

std::optional<std::string> FetchResult::header(const std::string& lower_name) const {
  auto it = headers.find(lower_name);
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

FetchResult Fetch(const std::string& method, const Url& url, const std::optional<IpAddress>& ip,
                  const FetchOptions& options, const BodySink& sink) {
  using Clock = std::chrono::steady_clock;
  FetchResult out;
  auto client = MakeClient(url, options);
  if (ip) client->set_hostname_addr_map({{url.host, ip->ToString()}});
  const auto ct = options.connect_timeout;
  client->set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(ct).count(),
                                 (ct.count() % 1000) * 1000);
  // Per-read timeout; the overall limit is enforced below.
  const auto read_to = std::min<std::chrono::milliseconds>(options.timeout, std::chrono::seconds(30));
  client->set_read_timeout(read_to.count() / 1000, (read_to.count() % 1000) * 1000);
  if (options.receive_buffer > 0) {
    const int size = options.receive_buffer;
    client->set_socket_options([size](socket_t sock) {
      ::setsockopt(sock, SOL_SOCKET, SO_RCVBUF, &size, sizeof size);
    });
  }
  client->set_follow_location(false);
  client->set_keep_alive(false);
  client->set_decompress(false);

  httplib::Headers headers;
  if (!options.user_agent.empty()) headers.emplace("User-Agent", options.user_agent);
  headers.emplace("Accept-Encoding", "identity");

  const auto start = Clock::now();
  bool timed_out = false;
  auto on_response = [&](const httplib::Response& r) {
    out.status = r.status;
    for (const auto& [k, v] : r.headers) out.headers[Lower(k)] = v;
    return true;
  };
  auto on_body = [&](const char* data, size_t len) {
    out.body_bytes += len;
    if (Clock::now() - start > options.timeout) {
      timed_out = true;
      return false;
    }
    return sink ? sink(data, len) : true;
  };

  httplib::Result res{nullptr, httplib::Error::Unknown};
  if (method == "HEAD") {
    res = client->Head(url.path, headers);
  } else {
    res = client->Get(url.path, headers, on_response, on_body);
  }
  out.elapsed = Clock::now() - start;
  if (res) {
    out.status = res->status;
    for (const auto& [k, v] : res->headers) out.headers[Lower(k)] = v;
  }
  long verify = X509_V_OK;
  if (url.scheme == "https") verify = static_cast<httplib::SSLClient*>(client.get())->get_openssl_verify_result();
  out.error = timed_out ? FetchError::kTimeout : Classify(res.error(), verify);
  if (out.error != FetchError::kNone) {
    out.error_detail = httplib::to_string(res.error());
    if (out.error == FetchError::kCertificate && verify != X509_V_OK) {
      out.error_detail += std::string(": ") + X509_verify_cert_error_string(verify);
    }
  }
  return out;
}

}  // namespace optperf::net

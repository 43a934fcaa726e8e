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

#include "optperf/testbed/fixture_server.h"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <atomic>

namespace optperf::testbed {
namespace {

constexpr size_t kChunk = 16 * 1024;

std::string HostOnly(const std::string& host_header) {
  if (!host_header.empty() && host_header.front() == '[') {
    return host_header.substr(0, host_header.find(']') + 1);
  }
  return host_header.substr(0, host_header.find(':'));
}

}  // namespace

struct FixtureServer::Impl {
  httplib::SSLServer server;
  std::map<std::pair<std::string, std::string>, FixtureResource> routes;
  mutable std::mutex mu;
  std::vector<AccessLogEntry> log;
  std::thread thread;

  Impl(const std::filesystem::path& cert, const std::filesystem::path& key)
      : server(cert.c_str(), key.c_str()) {}

  const FixtureResource* Find(const std::string& host, const std::string& path) {
    auto it = routes.find({host, path});
    if (it == routes.end()) it = routes.find({"*", path});
    return it == routes.end() ? nullptr : &it->second;
  }

  void Record(const httplib::Request& req, int status, uint64_t sent) {
    std::lock_guard lock(mu);
    log.push_back({req.method, HostOnly(req.get_header_value("Host")), req.path,
                   req.get_header_value("User-Agent"), status, sent});
  }

  void Handle(const httplib::Request& req, httplib::Response& res) {
    const std::string host = HostOnly(req.get_header_value("Host"));
    const FixtureResource* r = Find(host, req.path);
    if (!r) {
      res.status = 404;
      res.set_content("not found\n", "text/plain");
      Record(req, 404, 0);
      return;
    }
    res.status = r->status;
    for (const auto& [k, v] : r->headers) res.set_header(k, v);
    if (!r->body.empty()) {
      res.set_content(r->body, r->content_type);
      Record(req, r->status, req.method == "HEAD" ? 0 : r->body.size());
      return;
    }
    const size_t size = r->size;
    const size_t drop = r->drop_after;
    auto sent = std::make_shared<std::atomic<uint64_t>>(0);
    auto provide = [size, drop, sent](size_t offset, httplib::DataSink& sink) {
      if (offset >= drop) return false;
      const size_t n = std::min({kChunk, size - offset, drop - offset});
      std::vector<char> buf(n);
      for (size_t i = 0; i < n; ++i) buf[i] = static_cast<char>(ContentByte(offset + i));
      if (!sink.write(buf.data(), n)) return false;
      *sent += n;
      return true;
    };
    if (r->declare_length) {
      res.set_content_provider(size, r->content_type,
                               [provide](size_t offset, size_t, httplib::DataSink& sink) {
                                 return provide(offset, sink);
                               });
      // The log entry is written before streaming starts; bytes are
      // reported through the shared counter once the response is done.
    } else {
      auto offset = std::make_shared<size_t>(0);
      res.set_chunked_content_provider(
          r->content_type, [provide, offset, size, sent](size_t, httplib::DataSink& sink) {
            if (*offset >= size) {
              sink.done();
              return true;
            }
            const uint64_t before = *sent;
            if (!provide(*offset, sink)) return false;
            *offset += *sent - before;
            return true;
          });
    }
    std::lock_guard lock(mu);
    log.push_back({req.method, host, req.path, req.get_header_value("User-Agent"), r->status, 0});
    sent_counters.emplace_back(log.size() - 1, sent);
  }

  std::vector<std::pair<size_t, std::shared_ptr<std::atomic<uint64_t>>>> sent_counters;
};

FixtureServer::FixtureServer(const std::filesystem::path& cert, const std::filesystem::path& key)
    : impl_(std::make_unique<Impl>(cert, key)) {
  if (!impl_->server.is_valid()) {
    throw std::runtime_error("fixture server: cannot load " + cert.string());
  }
  impl_->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    impl_->Handle(req, res);
  });
  impl_->server.set_keep_alive_max_count(100);
}

FixtureServer::~FixtureServer() { Stop(); }

void FixtureServer::Add(const std::string& host, const std::string& path,
                        FixtureResource resource) {
  impl_->routes[{host, path}] = std::move(resource);
}

void FixtureServer::Listen(const std::string& address, int port) {
  if (!impl_->server.bind_to_port(address, port)) {
    throw std::runtime_error("fixture server: cannot bind " + address + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void FixtureServer::Stop() {
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

std::vector<AccessLogEntry> FixtureServer::log() const {
  std::lock_guard lock(impl_->mu);
  std::vector<AccessLogEntry> out = impl_->log;
  for (const auto& [index, sent] : impl_->sent_counters) out[index].body_bytes_sent = *sent;
  return out;
}

void FixtureServer::ClearLog() {
  std::lock_guard lock(impl_->mu);
  impl_->log.clear();
  impl_->sent_counters.clear();
}

}  // namespace optperf::testbed

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

#ifndef OPTPERF_NET_RESOLVER_H_
#define OPTPERF_NET_RESOLVER_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "optperf/common/ip_address.h"

namespace optperf::net {

class ResolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Resolver {
 public:
  virtual ~Resolver() = default;
  // Every address of `host`, IPv4 first. Throws ResolveError.
  virtual std::vector<IpAddress> Resolve(const std::string& host) = 0;
};

// getaddrinfo() with an optional hosts-file style override table. With
// `overrides_only`, names missing from the table fail instead of reaching
// the system resolver.
class SystemResolver : public Resolver {
 public:
  SystemResolver() = default;
  void AddOverride(const std::string& host, const IpAddress& address);
  // "address name [name...]" lines; '#' starts a comment.
  void LoadHostsFile(const std::filesystem::path& path);
  void set_overrides_only(bool v) { overrides_only_ = v; }

  std::vector<IpAddress> Resolve(const std::string& host) override;

 private:
  std::map<std::string, std::vector<IpAddress>> overrides_;
  bool overrides_only_ = false;
};

// Remembers answers for `ttl`.
class CachingResolver : public Resolver {
 public:
  CachingResolver(std::shared_ptr<Resolver> inner, std::chrono::seconds ttl)
      : inner_(std::move(inner)), ttl_(ttl) {}
  std::vector<IpAddress> Resolve(const std::string& host) override;

 private:
  struct Entry {
    std::chrono::steady_clock::time_point expires;
    std::vector<IpAddress> addresses;
  };
  std::shared_ptr<Resolver> inner_;
  std::chrono::seconds ttl_;
  std::mutex mu_;
  std::map<std::string, Entry> cache_;
};

// First IPv4 address if any, else the first address.
IpAddress PreferV4(const std::vector<IpAddress>& addresses);

}  // namespace optperf::net

#endif  // OPTPERF_NET_RESOLVER_H_

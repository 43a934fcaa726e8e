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

#include "optperf/net/resolver.h"

#include <netdb.h>
#include <sys/socket.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace optperf::net {
namespace {

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void SortV4First(std::vector<IpAddress>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const IpAddress& a, const IpAddress& b) { return a.is_v4() && !b.is_v4(); });
}

}  // namespace

void SystemResolver::AddOverride(const std::string& host, const IpAddress& address) {
  auto& v = overrides_[Lower(host)];
  if (std::find(v.begin(), v.end(), address) == v.end()) v.push_back(address);
  SortV4First(v);
}

void SystemResolver::LoadHostsFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResolveError("cannot read hosts file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (const size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string addr;
    if (!(ss >> addr)) continue;
    const auto ip = IpAddress::Parse(addr);
    if (!ip) throw ResolveError(path.string() + ": bad address '" + addr + "'");
    std::string name;
    while (ss >> name) AddOverride(name, *ip);
  }
}

std::vector<IpAddress> SystemResolver::Resolve(const std::string& host) {
  const std::string key = Lower(host);
  if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
  if (const auto literal = IpAddress::Parse(host)) return {*literal};
  if (overrides_only_) throw ResolveError(host + ": not in hosts override table");

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res);
  if (rc != 0) throw ResolveError(host + ": " + ::gai_strerror(rc));
  std::vector<IpAddress> out;
  for (addrinfo* p = res; p; p = p->ai_next) {
    IpAddress a;
    if (p->ai_family == AF_INET) {
      const auto* sin = reinterpret_cast<const sockaddr_in*>(p->ai_addr);
      a = IpAddress::FromBytes(IpFamily::kV4,
                               {reinterpret_cast<const uint8_t*>(&sin->sin_addr), 4});
    } else if (p->ai_family == AF_INET6) {
      const auto* sin6 = reinterpret_cast<const sockaddr_in6*>(p->ai_addr);
      a = IpAddress::FromBytes(IpFamily::kV6,
                               {reinterpret_cast<const uint8_t*>(&sin6->sin6_addr), 16});
    } else {
      continue;
    }
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  ::freeaddrinfo(res);
  if (out.empty()) throw ResolveError(host + ": no addresses");
  SortV4First(out);
  return out;
}

std::vector<IpAddress> CachingResolver::Resolve(const std::string& host) {
  const auto now = std::chrono::steady_clock::now();
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(host);
    if (it != cache_.end() && it->second.expires > now) return it->second.addresses;
  }
  auto addrs = inner_->Resolve(host);
  std::lock_guard lock(mu_);
  cache_[host] = {now + ttl_, addrs};
  return addrs;
}

IpAddress PreferV4(const std::vector<IpAddress>& addresses) {
  if (addresses.empty()) throw ResolveError("no addresses");
  for (const auto& a : addresses) {
    if (a.is_v4()) return a;
  }
  return addresses.front();
}

}  // namespace optperf::net

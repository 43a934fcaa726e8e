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

#ifndef OPTPERF_NET_URL_H_
#define OPTPERF_NET_URL_H_

#include <optional>
#include <string>
#include <string_view>

namespace optperf::net {

// Absolute http(s) URL. Host is lower-cased; the fragment is dropped.
struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;        // explicit or scheme default
  std::string path;    // starts with '/', includes the query

  static std::optional<Url> Parse(std::string_view text);

  int default_port() const { return scheme == "https" ? 443 : 80; }
  // Path without the query string.
  std::string path_only() const { return path.substr(0, path.find('?')); }
  std::string ToString() const;

  // RFC 3986 reference resolution for hrefs found on this page. Returns
  // nullopt for non-http(s) references (mailto:, javascript:, ...).
  std::optional<Url> Resolve(std::string_view ref) const;

  friend bool operator==(const Url&, const Url&) = default;
};

}  // namespace optperf::net

#endif  // OPTPERF_NET_URL_H_

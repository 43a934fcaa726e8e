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

#include "optperf/net/url.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace optperf::net {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// RFC 3986 section 5.2.4.
std::string RemoveDotSegments(std::string_view path) {
  std::vector<std::string_view> out;
  size_t i = 0;
  const bool absolute = !path.empty() && path[0] == '/';
  if (absolute) i = 1;
  bool trailing_slash = false;
  while (i <= path.size()) {
    size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    const std::string_view seg = path.substr(i, j - i);
    trailing_slash = j < path.size() || seg == "." || seg == "..";
    if (seg == "..") {
      if (!out.empty()) out.pop_back();
    } else if (seg != ".") {
      out.push_back(seg);
    }
    i = j + 1;
    if (j == path.size()) break;
  }
  std::string r = absolute ? "/" : "";
  for (size_t k = 0; k < out.size(); ++k) {
    if (k) r += '/';
    r += out[k];
  }
  if (trailing_slash && !out.empty() && !out.back().empty() && r.back() != '/') r += '/';
  return r;
}

}  // namespace

std::optional<Url> Url::Parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const size_t colon = text.find("://");
  if (colon == std::string_view::npos) return std::nullopt;
  Url u;
  u.scheme = Lower(text.substr(0, colon));
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
  std::string_view rest = text.substr(colon + 3);
  if (const size_t hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  const size_t slash = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, slash);
  std::string path(slash == std::string_view::npos ? "/" : rest.substr(slash));
  if (path[0] == '?') path = "/" + path;
  if (authority.find('@') != std::string_view::npos) return std::nullopt;
  std::string_view host = authority;
  std::string_view port;
  if (!authority.empty() && authority[0] == '[') {
    const size_t close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host = authority.substr(0, close + 1);
    if (close + 1 < authority.size()) {
      if (authority[close + 1] != ':') return std::nullopt;
      port = authority.substr(close + 2);
    }
  } else if (const size_t c = authority.rfind(':'); c != std::string_view::npos) {
    host = authority.substr(0, c);
    port = authority.substr(c + 1);
  }
  if (host.empty()) return std::nullopt;
  u.host = Lower(host);
  u.port = u.default_port();
  if (!port.empty()) {
    int p = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
    if (ec != std::errc() || ptr != port.data() + port.size() || p <= 0 || p > 65535) {
      return std::nullopt;
    }
    u.port = p;
  }
  const size_t q = path.find('?');
  u.path = RemoveDotSegments(path.substr(0, q)) + (q == std::string::npos ? "" : path.substr(q));
  return u;
}

std::string Url::ToString() const {
  std::string s = scheme + "://" + host;
  if (port != default_port()) s += ":" + std::to_string(port);
  return s + path;
}

std::optional<Url> Url::Resolve(std::string_view ref) const {
  while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.front()))) ref.remove_prefix(1);
  while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.back()))) ref.remove_suffix(1);
  if (const size_t hash = ref.find('#'); hash != std::string_view::npos) ref = ref.substr(0, hash);
  // Scheme present?
  const size_t colon = ref.find(':');
  const size_t first_sep = ref.find_first_of("/?");
  if (colon != std::string_view::npos && (first_sep == std::string_view::npos || colon < first_sep)) {
    return Parse(ref);
  }
  if (ref.substr(0, 2) == "//") return Parse(scheme + ":" + std::string(ref));
  Url out = *this;
  if (ref.empty()) return out;
  if (ref[0] == '/') {
    return Parse(scheme + "://" + host + ":" + std::to_string(port) + std::string(ref));
  }
  if (ref[0] == '?') {
    out.path = path_only() + std::string(ref);
    return out;
  }
  const std::string base = path_only();
  const std::string dir = base.substr(0, base.rfind('/') + 1);
  return Parse(scheme + "://" + host + ":" + std::to_string(port) + dir + std::string(ref));
}

}  // namespace optperf::net

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

#include "optperf/crawler/links.h"

#include <cctype>
#include <charconv>
#include <optional>

namespace optperf::crawler {
namespace {

bool IEquals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool IStartsWith(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && IEquals(s.substr(0, prefix.size()), prefix);
}

size_t IFind(std::string_view s, std::string_view needle, size_t from) {
  for (size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (IEquals(s.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

std::string DecodeEntities(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += '&';
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    if (name == "amp") {
      out += '&';
    } else if (name == "quot") {
      out += '"';
    } else if (name == "apos") {
      out += '\'';
    } else if (name == "lt") {
      out += '<';
    } else if (name == "gt") {
      out += '>';
    } else if (name.size() > 1 && name[0] == '#') {
      unsigned code = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string_view digits = name.substr(hex ? 2 : 1);
      const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), code, hex ? 16 : 10);
      if (ec != std::errc() || p != digits.data() + digits.size() || code == 0 || code > 0x7f) {
        out += s.substr(i, semi - i + 1);
      } else {
        out += static_cast<char>(code);
      }
    } else {
      out += s.substr(i, semi - i + 1);
    }
    i = semi;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Attribute value of `name` inside a tag body such as ` class=x href="/a"`.
std::optional<std::string_view> Attribute(std::string_view tag, std::string_view name) {
  size_t i = 0;
  while (i < tag.size()) {
    while (i < tag.size() && (std::isspace(static_cast<unsigned char>(tag[i])) || tag[i] == '/')) ++i;
    const size_t start = i;
    while (i < tag.size() && !std::isspace(static_cast<unsigned char>(tag[i])) && tag[i] != '=' &&
           tag[i] != '/') {
      ++i;
    }
    const std::string_view attr = tag.substr(start, i - start);
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    std::string_view value;
    if (i < tag.size() && tag[i] == '=') {
      ++i;
      while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
      if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
        const char q = tag[i++];
        const size_t end = tag.find(q, i);
        value = tag.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i);
        i = end == std::string_view::npos ? tag.size() : end + 1;
      } else {
        const size_t vs = i;
        while (i < tag.size() && !std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
        value = tag.substr(vs, i - vs);
      }
    }
    if (IEquals(attr, name)) return value;
    if (attr.empty() && i == start) ++i;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> ExtractLinks(std::string_view html) {
  std::vector<std::string> out;
  size_t i = 0;
  while ((i = html.find('<', i)) != std::string_view::npos) {
    if (html.substr(i, 4) == "<!--") {
      const size_t end = html.find("-->", i + 4);
      if (end == std::string_view::npos) break;
      i = end + 3;
      continue;
    }
    const std::string_view rest = html.substr(i + 1);
    if (IStartsWith(rest, "script") || IStartsWith(rest, "style")) {
      const std::string_view closing = IStartsWith(rest, "script") ? "</script" : "</style";
      const size_t end = IFind(html, closing, i + 1);
      if (end == std::string_view::npos) break;
      i = end + closing.size();
      continue;
    }
    const size_t close = html.find('>', i);
    if (close == std::string_view::npos) break;
    const bool anchor = rest.size() > 1 && (rest[0] == 'a' || rest[0] == 'A') &&
                        std::isspace(static_cast<unsigned char>(rest[1]));
    if (anchor) {
      if (auto href = Attribute(html.substr(i + 2, close - i - 2), "href")) {
        std::string link = DecodeEntities(Trim(*href));
        if (!link.empty() && link[0] != '#' && !IStartsWith(link, "javascript:") &&
            !IStartsWith(link, "mailto:") && !IStartsWith(link, "tel:") && !IStartsWith(link, "data:")) {
          out.push_back(std::move(link));
        }
      }
    }
    i = close + 1;
  }
  return out;
}

}  // namespace optperf::crawler

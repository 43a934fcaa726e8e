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

#include "optperf/crawler/robots.h"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace optperf::crawler {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string ProductToken(std::string_view user_agent) {
  user_agent = Trim(user_agent);
  const size_t end = user_agent.find_first_of("/ \t(");
  return Lower(user_agent.substr(0, end));
}

bool PatternMatches(std::string_view pattern, std::string_view path) {
  bool anchored = false;
  if (!pattern.empty() && pattern.back() == '$') {
    anchored = true;
    pattern.remove_suffix(1);
  }
  // reach[i]: some way of matching the pattern so far ends at path[i].
  std::vector<char> reach(path.size() + 1, 0), next(path.size() + 1);
  reach[0] = 1;
  for (char c : pattern) {
    std::fill(next.begin(), next.end(), 0);
    bool any = false;
    if (c == '*') {
      const auto first = std::find(reach.begin(), reach.end(), 1);
      if (first == reach.end()) return false;
      std::fill(next.begin() + (first - reach.begin()), next.end(), 1);
      any = true;
    } else {
      for (size_t i = 0; i < path.size(); ++i) {
        if (reach[i] && path[i] == c) next[i + 1] = any = 1;
      }
    }
    if (!any) return false;
    reach.swap(next);
  }
  if (anchored) return reach[path.size()];
  return std::find(reach.begin(), reach.end(), 1) != reach.end();
}

RobotsRules RobotsRules::DisallowAll() {
  RobotsRules r;
  r.rules_.push_back({false, "/"});
  return r;
}

RobotsRules RobotsRules::Parse(std::string_view text, std::string_view product_token) {
  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
    std::optional<double> delay;
  };
  std::vector<Group> groups;
  bool in_agent_lines = false;
  while (!text.empty()) {
    const size_t nl = text.find_first_of("\r\n");
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string key = Lower(Trim(line.substr(0, colon)));
    const std::string_view value = Trim(line.substr(colon + 1));
    if (key == "user-agent") {
      if (!in_agent_lines) groups.emplace_back();
      in_agent_lines = true;
      groups.back().agents.push_back(Lower(value));
      continue;
    }
    if (groups.empty()) continue;  // rules before any user-agent line
    in_agent_lines = false;
    if (key == "allow" || key == "disallow") {
      if (!value.empty()) groups.back().rules.push_back({key == "allow", std::string(value)});
    } else if (key == "crawl-delay") {
      double d = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
      if (ec == std::errc() && d >= 0) groups.back().delay = d;
    }
  }
  const std::string token = Lower(product_token);
  RobotsRules out;
  auto collect = [&](auto pred) {
    bool found = false;
    for (const auto& g : groups) {
      if (std::any_of(g.agents.begin(), g.agents.end(), pred)) {
        found = true;
        out.rules_.insert(out.rules_.end(), g.rules.begin(), g.rules.end());
        if (g.delay) out.crawl_delay_ = std::max(out.crawl_delay_.value_or(0), *g.delay);
      }
    }
    return found;
  };
  if (!token.empty() && collect([&](const std::string& a) { return ProductToken(a) == token; })) {
    return out;
  }
  collect([](const std::string& a) { return a == "*"; });
  return out;
}

bool RobotsRules::IsAllowed(std::string_view path) const {
  if (path == "/robots.txt") return true;
  const Rule* best = nullptr;
  for (const auto& r : rules_) {
    if (!PatternMatches(r.pattern, path)) continue;
    if (!best || r.pattern.size() > best->pattern.size() ||
        (r.pattern.size() == best->pattern.size() && r.allow && !best->allow)) {
      best = &r;
    }
  }
  return !best || best->allow;
}

}  // namespace optperf::crawler

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

#ifndef OPTPERF_CRAWLER_ROBOTS_H_
#define OPTPERF_CRAWLER_ROBOTS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace optperf::crawler {

// robots.txt rules for one crawler (RFC 9309 matching: groups for the
// product token, else "*"; longest matching rule wins, Allow on ties;
// '*' and '$' wildcards).
class RobotsRules {
 public:
  static RobotsRules AllowAll() { return RobotsRules(); }
  static RobotsRules DisallowAll();
  static RobotsRules Parse(std::string_view text, std::string_view product_token);

  // `path` includes the query string.
  bool IsAllowed(std::string_view path) const;
  std::optional<double> crawl_delay() const { return crawl_delay_; }

 private:
  struct Rule {
    bool allow;
    std::string pattern;
  };
  std::vector<Rule> rules_;
  std::optional<double> crawl_delay_;
};

// "Research-Bot/1.0 (+https://x)" -> "research-bot".
std::string ProductToken(std::string_view user_agent);

bool PatternMatches(std::string_view pattern, std::string_view path);

}  // namespace optperf::crawler

#endif  // OPTPERF_CRAWLER_ROBOTS_H_

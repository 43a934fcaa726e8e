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

#include <gtest/gtest.h>

#include "optperf/crawler/crawler.h"
#include "optperf/crawler/links.h"
#include "optperf/crawler/robots.h"

namespace optperf::crawler {
namespace {

using Links = std::vector<std::string>;

TEST(RobotsTest, ProductToken) {
  EXPECT_EQ(ProductToken("OptPerf-Research/0.1 (+https://example.org)"), "optperf-research");
  EXPECT_EQ(ProductToken("  bot "), "bot");
}

TEST(RobotsTest, DisallowDirectory) {
  const auto r = RobotsRules::Parse("User-agent: *\nDisallow: /files/\n", "bot");
  EXPECT_FALSE(r.IsAllowed("/files/big.bin"));
  EXPECT_TRUE(r.IsAllowed("/files"));
  EXPECT_TRUE(r.IsAllowed("/index.html"));
  EXPECT_TRUE(r.IsAllowed("/robots.txt"));
}

TEST(RobotsTest, SpecificGroupReplacesStar) {
  const char* text =
      "User-agent: *\n"
      "Disallow: /\n"
      "\n"
      "User-agent: Other\n"
      "User-agent: BOT\n"
      "Disallow: /private\n";
  const auto r = RobotsRules::Parse(text, "bot");
  EXPECT_TRUE(r.IsAllowed("/public"));
  EXPECT_FALSE(r.IsAllowed("/private/x"));
  const auto s = RobotsRules::Parse(text, "somebody");
  EXPECT_FALSE(s.IsAllowed("/public"));
}

TEST(RobotsTest, LongestMatchAndAllowOnTie) {
  const auto r = RobotsRules::Parse(
      "user-agent: *\ndisallow: /a\nallow: /a/b\ndisallow: /c\nallow: /c\n", "bot");
  EXPECT_FALSE(r.IsAllowed("/a/x"));
  EXPECT_TRUE(r.IsAllowed("/a/b/c"));
  EXPECT_TRUE(r.IsAllowed("/c/x"));
}

TEST(RobotsTest, Wildcards) {
  const auto r = RobotsRules::Parse("User-agent: *\nDisallow: /*.bin$\nDisallow: /tmp*/x\n", "bot");
  EXPECT_FALSE(r.IsAllowed("/dl/file.bin"));
  EXPECT_TRUE(r.IsAllowed("/dl/file.bin?x=1"));
  EXPECT_FALSE(r.IsAllowed("/tmp123/x/y"));
  EXPECT_TRUE(r.IsAllowed("/tmp123/y"));
  EXPECT_TRUE(PatternMatches("/", "/anything"));
  EXPECT_TRUE(PatternMatches("*", ""));
  EXPECT_FALSE(PatternMatches("/a$", "/ab"));
  EXPECT_TRUE(PatternMatches("/a*b*c$", "/axxbyyc"));
}

TEST(RobotsTest, EmptyDisallowCommentsAndCrawlDelay) {
  const auto r = RobotsRules::Parse(
      "# hello\nUser-agent: * # all\nDisallow:\nCrawl-delay: 2.5\n", "bot");
  EXPECT_TRUE(r.IsAllowed("/x"));
  EXPECT_EQ(r.crawl_delay(), 2.5);
  EXPECT_FALSE(RobotsRules::DisallowAll().IsAllowed("/x"));
  EXPECT_TRUE(RobotsRules::AllowAll().IsAllowed("/x"));
}

TEST(RobotsTest, RulesBeforeAnyAgentAreIgnored) {
  const auto r = RobotsRules::Parse("Disallow: /\nUser-agent: *\nAllow: /\n", "bot");
  EXPECT_TRUE(r.IsAllowed("/x"));
}

TEST(LinksTest, AnchorsOnly) {
  const char* html =
      "<html><head><link href=\"/style.css\"><script>var a='<a href=\"/js\">';</script></head>"
      "<body><A HREF='/one'>1</A> <a class=x href=/two>2</a>"
      "<!-- <a href=\"/commented\"> -->"
      "<a href=\"https://other.test/three?a=1&amp;b=2\">3</a>"
      "<a name=anchor>no href</a><a href=\"#top\">top</a>"
      "<a href=\"javascript:void(0)\">js</a><a href=\"mailto:x@y\">m</a>"
      "<abbr href=\"/not-anchor\">x</abbr>"
      "<a\nhref = \" /spaced \" >s</a></body></html>";
  EXPECT_EQ(ExtractLinks(html),
            (Links{"/one", "/two", "https://other.test/three?a=1&b=2", "/spaced"}));
}

TEST(LinksTest, MalformedInputDoesNotHang) {
  EXPECT_TRUE(ExtractLinks("<a href=\"/x").empty());
  EXPECT_TRUE(ExtractLinks("<a href").empty());
  EXPECT_TRUE(ExtractLinks("<!-- never closed <a href=/x>").empty());
  EXPECT_TRUE(ExtractLinks("<<<>>><a =>").empty());
  EXPECT_EQ(ExtractLinks("<a href=\"&#47;dec\">"), Links{"/dec"});
}

TEST(ContentLengthTest, Parsing) {
  EXPECT_EQ(ParseContentLength("1048576"), 1048576u);
  EXPECT_EQ(ParseContentLength(" 42 "), 42u);
  EXPECT_EQ(ParseContentLength(std::nullopt), std::nullopt);
  EXPECT_EQ(ParseContentLength("abc"), std::nullopt);
  EXPECT_EQ(ParseContentLength("-1"), std::nullopt);
  EXPECT_EQ(ParseContentLength("12a"), std::nullopt);
  EXPECT_EQ(ParseContentLength(""), std::nullopt);
  EXPECT_EQ(ParseContentLength("99999999999999999999999"), std::nullopt);
}

TEST(UrlResolveTest, RelativeLinks) {
  const auto base = *net::Url::Parse("https://www.site.test/dir/page.html");
  EXPECT_EQ(base.Resolve("big.bin")->ToString(), "https://www.site.test/dir/big.bin");
  EXPECT_EQ(base.Resolve("../up.bin")->ToString(), "https://www.site.test/up.bin");
  EXPECT_EQ(base.Resolve("//cdn.site.test/x")->host, "cdn.site.test");
  EXPECT_EQ(base.Resolve("?q=1")->path, "/dir/page.html?q=1");
}

}  // namespace
}  // namespace optperf::crawler

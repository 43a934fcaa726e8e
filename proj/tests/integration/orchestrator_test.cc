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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "optperf/capture/pcap.h"
#include "optperf/common/sysctl.h"
#include "optperf/orchestrator/host_options.h"
#include "optperf/orchestrator/measurement.h"
#include "optperf/orchestrator/packet_capture.h"
#include "optperf/testbed/fixture_env.h"

namespace optperf::orchestrator {
namespace {

using namespace std::chrono_literals;
using testbed::FixtureEnvironment;
using testbed::FixtureResource;

std::filesystem::path Workdir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("optperf_orch_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

OrchestratorOptions FastOptions(const FixtureEnvironment& env, const std::string& matrix) {
  OrchestratorOptions o;
  o.matrix = ParseMatrix(matrix);
  o.fetch.ca_file = env.ca_file();
  o.fetch.user_agent = "optperf-test";
  o.fetch.timeout = 30s;
  o.gap = 10ms;
  o.capture_linger = 100ms;
  o.capture_dir = env.workdir() / "captures";
  o.vantage_point = "TB";
  return o;
}

crawler::CrawlTarget Target(const std::string& url) {
  crawler::CrawlTarget t;
  t.domain = net::Url::Parse(url)->host;
  t.file_url = url;
  return t;
}

class OrchestratorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    env_ = std::make_unique<FixtureEnvironment>(testbed::PathParams{2ms, 2ms, 0},
                                                Workdir(::testing::UnitTest::GetInstance()
                                                            ->current_test_info()
                                                            ->name()));
    site_ = &env_->AddServer({"www.fixture.test", "gone.fixture.test", "blocked.fixture.test"});
    auto& site = *site_;
    FixtureResource big;
    big.size = 300'000;
    site.Add("www.fixture.test", "/big.bin", big);
    FixtureResource challenge;
    challenge.status = 403;
    challenge.content_type = "text/html; charset=utf-8";
    challenge.body = "<html>checking your browser</html>";
    site.Add("blocked.fixture.test", "/big.bin", challenge);
    auto& other = env_->AddServer({"unrelated.test"});
    other.Add("*", "/big.bin", big);
  }

  template <typename F>
  auto InClient(F&& f) {
    return env_->bed().client().Run(std::forward<F>(f));
  }

  std::unique_ptr<FixtureEnvironment> env_;
  testbed::FixtureServer* site_ = nullptr;
};

TEST_F(OrchestratorTest, WarmupBaselineAllProducesThreeCaptures) {
  const auto before = InClient([] { return HostTcpSettings::Read(); });
  const auto run = InClient([&] {
    Orchestrator o(FastOptions(*env_, "WARMUP,BL,ALL"), env_->resolver());
    return o.Run(Target("https://www.fixture.test/big.bin"), "r1");
  });
  ASSERT_EQ(run.entries.size(), 3u);
  int64_t prev_end = 0;
  for (const auto& e : run.entries) {
    EXPECT_EQ(e.outcome, Outcome::kOk) << e.config << ": " << e.reason;
    EXPECT_EQ(e.bytes, 300'000u);
    EXPECT_GT(e.resolved_at_us, prev_end);
    EXPECT_LE(e.resolved_at_us, e.start_us);
    EXPECT_LT(e.start_us, e.end_us);
    prev_end = e.end_us;
    const auto cap = capture::ReadCaptureFile(e.capture);
    EXPECT_GT(cap.packets.size(), 10u);
    const auto syn = FirstSyn(cap.packets);
    ASSERT_TRUE(syn.has_value());
    EXPECT_EQ(*syn, ExpectedSyn(OptionConfig::Named(e.config))) << syn->ToString();
  }
  EXPECT_EQ(InClient([] { return HostTcpSettings::Read(); }), before);
  // Round trip through the manifest.
  const auto manifest = env_->workdir() / "manifest.json";
  WriteManifest(manifest, {run});
  const auto back = ReadManifest(manifest);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].entries[2].capture, run.entries[2].capture);
  EXPECT_EQ(back[0].entries[1].start_us, run.entries[1].start_us);
}

TEST_F(OrchestratorTest, MissingFileIsIncompleteForEveryConfig) {
  const auto run = InClient([&] {
    OrchestratorOptions opts = FastOptions(*env_, "WARMUP,BL,WS");
    opts.capture = false;
    return Orchestrator(opts, env_->resolver()).Run(Target("https://gone.fixture.test/big.bin"), "r");
  });
  ASSERT_EQ(run.entries.size(), 3u);
  for (const auto& e : run.entries) {
    EXPECT_EQ(e.outcome, Outcome::kIncomplete);
    EXPECT_EQ(e.http_status, 404);
  }
}

class FlakyResolver : public net::Resolver {
 public:
  FlakyResolver(std::shared_ptr<net::Resolver> inner, int fail_call)
      : inner_(std::move(inner)), fail_call_(fail_call) {}
  std::vector<IpAddress> Resolve(const std::string& host) override {
    if (++calls_ == fail_call_) throw net::ResolveError(host + ": SERVFAIL");
    return inner_->Resolve(host);
  }

 private:
  std::shared_ptr<net::Resolver> inner_;
  int fail_call_;
  int calls_ = 0;
};

TEST_F(OrchestratorTest, DnsFailureAffectsOnlyItsEntry) {
  const auto run = InClient([&] {
    OrchestratorOptions opts = FastOptions(*env_, "WARMUP,BL,SACK");
    opts.capture = false;
    auto flaky = std::make_shared<FlakyResolver>(env_->resolver(), 2);
    return Orchestrator(opts, flaky).Run(Target("https://www.fixture.test/big.bin"), "r");
  });
  ASSERT_EQ(run.entries.size(), 3u);
  EXPECT_EQ(run.entries[0].outcome, Outcome::kOk);
  EXPECT_EQ(run.entries[1].outcome, Outcome::kDnsFail);
  EXPECT_TRUE(run.entries[1].resolved_ip.empty());
  EXPECT_EQ(run.entries[2].outcome, Outcome::kOk);
}

TEST_F(OrchestratorTest, ForcedIpChecksCertificateAgainstHostname) {
  const auto ip = *IpAddress::Parse(env_->AddressOf("www.fixture.test"));
  const auto wrong = *IpAddress::Parse(env_->AddressOf("unrelated.test"));
  net::FetchOptions f;
  f.ca_file = env_->ca_file();
  f.timeout = 20s;
  const auto url = *net::Url::Parse("https://www.fixture.test/big.bin");
  const auto ok = InClient([&] { return ForcedIpDownload(url, ip, f); });
  EXPECT_EQ(ok.outcome, Outcome::kOk) << ok.reason;
  EXPECT_EQ(ok.bytes, 300'000u);
  const auto bad = InClient([&] { return ForcedIpDownload(url, wrong, f); });
  EXPECT_EQ(bad.outcome, Outcome::kConnectFail);
  EXPECT_NE(bad.reason.find("certificate"), std::string::npos) << bad.reason;
  const auto blocked = InClient([&] {
    return ForcedIpDownload(*net::Url::Parse("https://blocked.fixture.test/big.bin"), ip, f);
  });
  EXPECT_EQ(blocked.outcome, Outcome::kBlocked);
  // Server sees the research user agent and the real host name.
  f.user_agent = "optperf-research (+https://example.org/optperf)";
  site_->ClearLog();
  InClient([&] { return ForcedIpDownload(url, ip, f); });
  const auto log = site_->log();
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].host, "www.fixture.test");
  EXPECT_EQ(log[0].user_agent, f.user_agent);
  EXPECT_EQ(log[0].body_bytes_sent, 300'000u);
}

TEST_F(OrchestratorTest, QuicAdaptersRunAfterTcpAndReportFailure) {
  const auto run = InClient([&] {
    OrchestratorOptions opts = FastOptions(*env_, "WARMUP,BL,QUIC:broken,QUIC:fake");
    opts.quic_adapters["broken"] = ParseQuicAdapter("broken=/bin/false {url}");
    opts.quic_adapters["fake"] = ParseQuicAdapter("fake=/bin/sh -c echo>{output}");
    return Orchestrator(opts, env_->resolver()).Run(Target("https://www.fixture.test/big.bin"), "q");
  });
  ASSERT_EQ(run.entries.size(), 4u);
  EXPECT_EQ(run.entries[2].config, "QUIC:broken");
  EXPECT_EQ(run.entries[2].outcome, Outcome::kConnectFail);
  EXPECT_EQ(run.entries[3].outcome, Outcome::kOk) << run.entries[3].reason;
  EXPECT_GT(run.entries[2].start_us, run.entries[1].end_us);
}

TEST_F(OrchestratorTest, AioquicAdapterDownloadsOverHttp3) {
  const std::string src = OPTPERF_SOURCE_DIR;
  env_->AddQuicServer("www.fixture.test", src + "/tests/fixtures/h3_server.py",
                      {{"/big.bin", 300'000}});
  const std::string adapter = "aioquic=python3 " + src + "/tools/quic/aioquic_get.py --ca-file " +
                              env_->ca_file().string() + " {url} {ip} {output}";
  const auto run = InClient([&] {
    OrchestratorOptions opts = FastOptions(*env_, "BL,QUIC:aioquic");
    opts.quic_adapters["aioquic"] = ParseQuicAdapter(adapter);
    return Orchestrator(opts, env_->resolver()).Run(Target("https://www.fixture.test/big.bin"), "h3");
  });
  ASSERT_EQ(run.entries.size(), 2u);
  const auto& q = run.entries[1];
  ASSERT_EQ(q.outcome, Outcome::kOk) << q.reason;
  EXPECT_EQ(q.bytes, 300'000u);
  size_t udp = 0;
  for (const auto& p : capture::ReadCaptureFile(q.capture).packets) {
    udp += p.transport == capture::Transport::kUdp && (p.src.port == 443 || p.dst.port == 443);
  }
  EXPECT_GT(udp, 200u);
}

TEST_F(OrchestratorTest, AioquicAdapterWithoutServerIsConnectFail) {
  const std::string adapter = "aioquic=python3 " + std::string(OPTPERF_SOURCE_DIR) +
                              "/tools/quic/aioquic_get.py --timeout 3 --ca-file " +
                              env_->ca_file().string() + " {url} {ip} {output}";
  const auto run = InClient([&] {
    OrchestratorOptions opts = FastOptions(*env_, "QUIC:aioquic");
    opts.quic_adapters["aioquic"] = ParseQuicAdapter(adapter);
    return Orchestrator(opts, env_->resolver()).Run(Target("https://www.fixture.test/big.bin"), "h3");
  });
  ASSERT_EQ(run.entries.size(), 1u);
  EXPECT_EQ(run.entries[0].outcome, Outcome::kConnectFail) << run.entries[0].reason;
}

TEST(OrchestratorConfigTest, UnregisteredQuicClientIsConfigError) {
  OrchestratorOptions o;
  o.matrix = ParseMatrix("WARMUP,BL,QUIC:missing");
  EXPECT_THROW(Orchestrator(o, std::make_shared<net::SystemResolver>()), MatrixError);
}

TEST(OptionConfigTest, MatrixInvariants) {
  EXPECT_EQ(FormatMatrix(DefaultMatrix({"a"})), "WARMUP,BL,ECN,SACK,WS,ALL,QUIC:a");
  EXPECT_THROW(ParseMatrix("BL,WARMUP"), MatrixError);
  EXPECT_THROW(ParseMatrix("BL,QUIC:a,WS"), MatrixError);
  EXPECT_THROW(ParseMatrix("BL,BL"), MatrixError);
  EXPECT_THROW(ParseMatrix("TFO"), MatrixError);
  EXPECT_THROW(ParseMatrix(""), MatrixError);
  const auto all = OptionConfig::Named("ALL");
  EXPECT_TRUE(all.ecn && all.sack && all.ws);
  EXPECT_EQ(all.ws_shift, 14);
  const auto bl = OptionConfig::Named("BL");
  EXPECT_FALSE(bl.ecn || bl.sack || bl.ws);
  EXPECT_EQ(ReceiveBufferForShift(14), 536870912u);
}

TEST(OutcomeTest, ClassifyFetch) {
  net::FetchResult f;
  f.status = 200;
  f.body_bytes = 10;
  f.headers["content-length"] = "10";
  EXPECT_EQ(ClassifyFetch(f).outcome, Outcome::kOk);
  f.headers["content-length"] = "20";
  EXPECT_EQ(ClassifyFetch(f).outcome, Outcome::kIncomplete);
  f.headers.erase("content-length");
  f.status = 503;
  f.headers["content-type"] = "text/html";
  EXPECT_EQ(ClassifyFetch(f).outcome, Outcome::kBlocked);
  f.headers["content-type"] = "application/octet-stream";
  EXPECT_EQ(ClassifyFetch(f).outcome, Outcome::kIncomplete);
  f.status = 0;
  f.error = net::FetchError::kCertificate;
  EXPECT_EQ(ClassifyFetch(f).outcome, Outcome::kConnectFail);
}

}  // namespace
}  // namespace optperf::orchestrator

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

#include <random>

#include <nlohmann/json.hpp>

#include "flow_builder.h"
#include "optperf/capture/pcap.h"
#include "optperf/metrics/indicator_record.h"
#include "optperf/metrics/metrics.h"
#include "oracles/brute_force.h"
#include "synthetic_flows.h"

namespace optperf::metrics {
namespace {

using testing::FlowBuilder;
namespace tf = capture::tcp_flags;
using RC = RetransmissionClass;

Flow FromFixture(const std::string& name) {
  const auto cap = capture::ReadCaptureFile(std::filesystem::path(OPTPERF_TEST_DATA_DIR) /
                                            "capture" / name);
  return capture::DemuxFlows(cap.packets).at(0);
}

// Splits `bytes` over `n` packets from t=0 to t=span_us.
Flow Spread(uint64_t bytes, int n, int64_t span_us, bool udp = false) {
  FlowBuilder b;
  for (int i = 0; i < n; ++i) {
    const int64_t t = span_us * i / (n - 1);
    auto& p = udp ? b.Udp(i % 2 == 0, t, 0) : b.Add(i % 2 == 0, t, tf::kAck, 1, 1, 0);
    p.ip_total_length = static_cast<uint32_t>(bytes / n + (i == 0 ? bytes % n : 0));
  }
  return b.Build();
}

TEST(MeanThroughputTest, MegabyteOverOneSecond) {
  EXPECT_EQ(MeanThroughput(Spread(1'000'000, 10, 1'000'000)), 8'000'000.0);
}

TEST(MeanThroughputTest, DegenerateFlowsAreUndefined) {
  FlowBuilder one;
  one.Add(true, 0, tf::kSyn, 1, 0, 0);
  EXPECT_THROW(MeanThroughput(one.Build()), UndefinedThroughput);
  FlowBuilder same_instant;
  same_instant.Add(true, 5, tf::kSyn, 1, 0, 0);
  same_instant.Add(false, 5, tf::kSyn | tf::kAck, 1, 2, 0);
  EXPECT_THROW(MeanThroughput(same_instant.Build()), UndefinedThroughput);
  EXPECT_THROW(ComputeIndicators(same_instant.Build()), UndefinedThroughput);
}

TEST(MeanThroughputTest, CountsBothDirections) {
  FlowBuilder b;
  b.Add(true, 0, tf::kAck, 1, 1, 0).ip_total_length = 100;
  b.Add(false, 1'000'000, tf::kAck, 1, 1, 0).ip_total_length = 900;
  const Flow f = b.Build();
  EXPECT_EQ(MeanThroughput(f), 8000.0);
  EXPECT_EQ(ResponderThroughput(f), 7200.0);
}

TEST(QuicThroughputTest, Examples) {
  EXPECT_EQ(QuicThroughput(Spread(2'500'000, 5, 2'000'000, true)), 10'000'000.0);
  FlowBuilder one;
  one.Udp(true, 0, 1200);
  EXPECT_THROW(QuicThroughput(one.Build()), UndefinedThroughput);
  EXPECT_THROW(QuicThroughput(Spread(100, 2, 10)), std::invalid_argument);
}

TEST(RttSamplesTest, SinglePair) {
  FlowBuilder b;
  b.Add(false, 0, tf::kAck, 1, 1, 1000).tcp_options.timestamp = capture::TcpTimestamp{100, 5};
  b.Add(true, 50'000, tf::kAck, 1, 1001, 0).tcp_options.timestamp =
      capture::TcpTimestamp{6, 100};
  const auto samples = RttSamples(b.Build());
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_DOUBLE_EQ(samples[0].ms, 50.0);
  // No handshake, so the first sender is taken as the initiator.
  EXPECT_EQ(samples[0].direction, Direction::kFromInitiator);
}

TEST(RttSamplesTest, EarliestUnmatchedSenderPacketWins) {
  FlowBuilder b;
  b.Add(false, 0, tf::kAck, 1, 1, 1000).tcp_options.timestamp = capture::TcpTimestamp{100, 5};
  b.Add(false, 10'000, tf::kAck, 1001, 1, 1000).tcp_options.timestamp =
      capture::TcpTimestamp{100, 5};
  b.Add(true, 50'000, tf::kAck, 1, 2001, 0).tcp_options.timestamp =
      capture::TcpTimestamp{6, 100};
  const auto samples = RttSamples(b.Build());
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_DOUBLE_EQ(samples[0].ms, 50.0);
  EXPECT_EQ(MeanRttMs(samples), 50.0);
}

TEST(RttSamplesTest, NoTimestampOptionNoSamples) {
  FlowBuilder b;
  b.Add(false, 0, tf::kAck, 1, 1, 1000);
  b.Add(true, 50'000, tf::kAck, 1, 1001, 0);
  EXPECT_TRUE(RttSamples(b.Build()).empty());
  EXPECT_FALSE(MeanRttMs(RttSamples(b.Build())).has_value());
}

TEST(RttSamplesTest, OneSidedTimestampsGiveNoSamples) {
  FlowBuilder b;
  b.Add(false, 0, tf::kAck, 1, 1, 1000).tcp_options.timestamp = capture::TcpTimestamp{100, 0};
  b.Add(true, 50'000, tf::kAck, 1, 1001, 0);
  EXPECT_TRUE(RttSamples(b.Build()).empty());
}

TEST(RttSamplesTest, EchoWithoutAckFlagIsIgnored) {
  FlowBuilder b;
  b.Add(true, 0, tf::kSyn, 1, 0, 0).tcp_options.timestamp = capture::TcpTimestamp{100, 0};
  b.Add(false, 1000, tf::kRst, 1, 0, 0).tcp_options.timestamp = capture::TcpTimestamp{9, 100};
  EXPECT_TRUE(RttSamples(b.Build()).empty());
}

TEST(RttSamplesTest, MatchesAcrossTsvalWrap) {
  FlowBuilder b;
  uint32_t v = 0xfffffffeu;
  for (int i = 0; i < 4; ++i, ++v) {
    b.Add(false, i * 10'000, tf::kAck, 1 + i * 100, 1, 100).tcp_options.timestamp =
        capture::TcpTimestamp{v, 0};
    b.Add(true, i * 10'000 + 3'000, tf::kAck, 1, 101 + i * 100, 0).tcp_options.timestamp =
        capture::TcpTimestamp{1, v};
  }
  const auto samples = RttSamples(b.Build());
  ASSERT_EQ(samples.size(), 4u);
  for (const auto& s : samples) EXPECT_DOUBLE_EQ(s.ms, 3.0);
}

TEST(ClassifyTest, IncreasingSequenceAllNone) {
  FlowBuilder b;
  b.Handshake(0, 100, 1000);
  for (int i = 0; i < 5; ++i) b.Add(false, 2000 + i, tf::kAck, 1001 + i * 1000, 101, 1000);
  const auto cls = ClassifyRetransmissions(b.Build());
  EXPECT_EQ(cls.count(RC::kNone), cls.classes.size());
  EXPECT_FALSE(cls.best_effort);
}

// Server ISN 999, so the first data byte is 1000.
void Segment1000(FlowBuilder& b, int64_t t) { b.Add(false, t, tf::kAck, 1000, 101, 1000); }

TEST(ClassifyTest, ResentSegmentBelowNoAckIsRetransmission) {
  FlowBuilder b;
  b.Handshake(0, 100, 999);
  Segment1000(b, 2000);
  b.Add(true, 3000, tf::kAck, 101, 1000, 0);
  Segment1000(b, 300'000);
  const auto cls = ClassifyRetransmissions(b.Build());
  EXPECT_EQ(cls.classes[3], RC::kNone);
  EXPECT_EQ(cls.classes[5], RC::kRetransmission);
}

void DupAcksThenResend(FlowBuilder& b, int64_t resend_delay_us) {
  b.Handshake(0, 100, 999);
  Segment1000(b, 2000);                                    // 3
  b.Add(false, 2100, tf::kAck, 2000, 101, 1000);           // 4
  b.Add(true, 10'000, tf::kAck, 101, 1000, 0, 2000);       // 5 window update
  b.Add(true, 10'100, tf::kAck, 101, 1000, 0, 2000);       // 6 dup
  b.Add(true, 10'200, tf::kAck, 101, 1000, 0, 2000);       // 7 dup
  b.Add(true, 10'300, tf::kAck, 101, 1000, 0, 2000);       // 8 dup
  Segment1000(b, 10'300 + resend_delay_us);                // 9
}

TEST(ClassifyTest, FastRetransmitFiveMillisecondsAfterDupAcks) {
  FlowBuilder b;
  DupAcksThenResend(b, 5'000);
  const auto cls = ClassifyRetransmissions(b.Build());
  EXPECT_EQ(cls.classes[9], RC::kFastRetransmission);
}

TEST(ClassifyTest, LateResendIsPlainRetransmission) {
  FlowBuilder b;
  DupAcksThenResend(b, 500'000);
  const auto cls = ClassifyRetransmissions(b.Build());
  EXPECT_EQ(cls.classes[9], RC::kRetransmission);
}

TEST(ClassifyTest, FastRetransmitWindowBoundaryIsInclusive) {
  FlowBuilder at;
  DupAcksThenResend(at, 20'000);
  EXPECT_EQ(ClassifyRetransmissions(at.Build()).classes[9], RC::kFastRetransmission);
  FlowBuilder past;
  DupAcksThenResend(past, 20'001);
  EXPECT_EQ(ClassifyRetransmissions(past.Build()).classes[9], RC::kRetransmission);
}

TEST(ClassifyTest, SingleDupAckIsNotEnough) {
  FlowBuilder b;
  b.Handshake(0, 100, 999);
  Segment1000(b, 2000);
  b.Add(true, 10'000, tf::kAck, 101, 1000, 0, 2000);
  b.Add(true, 10'100, tf::kAck, 101, 1000, 0, 2000);
  Segment1000(b, 11'000);
  EXPECT_EQ(ClassifyRetransmissions(b.Build()).classes[6], RC::kRetransmission);
}

TEST(ClassifyTest, AckWithDifferentWindowIsNotDuplicate) {
  FlowBuilder b;
  b.Handshake(0, 100, 999);
  Segment1000(b, 2000);
  b.Add(true, 10'000, tf::kAck, 101, 1000, 0, 1500);
  b.Add(true, 10'100, tf::kAck, 101, 1000, 0, 2000);
  b.Add(true, 10'200, tf::kAck, 101, 1000, 0, 3000);
  Segment1000(b, 11'000);
  EXPECT_EQ(ClassifyRetransmissions(b.Build()).classes[7], RC::kRetransmission);
}

TEST(ClassifyTest, ResendBelowAckPointIsSpurious) {
  FlowBuilder b;
  b.Handshake(0, 100, 999);
  Segment1000(b, 2000);
  b.Add(true, 3000, tf::kAck, 101, 2000, 0);
  Segment1000(b, 400'000);
  EXPECT_EQ(ClassifyRetransmissions(b.Build()).classes[5], RC::kSpurious);
}

TEST(ClassifyTest, KeepAliveIsNoneAndCounted) {
  FlowBuilder b;
  b.Handshake(0, 100, 999);
  Segment1000(b, 2000);
  b.Add(true, 3000, tf::kAck, 101, 2000, 0);
  b.Add(false, 60'000'000, tf::kAck, 1999, 101, 1);
  b.Add(false, 120'000'000, tf::kAck, 1999, 101, 0);
  const auto cls = ClassifyRetransmissions(b.Build());
  EXPECT_EQ(cls.classes[5], RC::kNone);
  EXPECT_EQ(cls.keepalives, 1u);
}

TEST(ClassifyTest, MissingHandshakeIsBestEffort) {
  FlowBuilder b;
  b.Add(false, 0, tf::kAck, 5000, 1, 1000);
  b.Add(false, 10, tf::kAck, 5000, 1, 1000);
  const auto cls = ClassifyRetransmissions(b.Build());
  EXPECT_TRUE(cls.best_effort);
  EXPECT_EQ(cls.classes[1], RC::kRetransmission);
}

TEST(ClassifyTest, SequenceWrapIsHandled) {
  FlowBuilder b;
  b.Handshake(0, 100, 0xfffffc17u);  // first data byte at 0xfffffc18
  b.Add(false, 1000, tf::kAck, 0xfffffc18u, 101, 2000);  // crosses zero
  b.Add(false, 1001, tf::kAck, 0x00000000u, 101, 1000);  // overlaps 0..1000
  b.Add(false, 1002, tf::kAck, 0x00000400u, 101, 1000);  // new data past the copy
  const auto cls = ClassifyRetransmissions(b.Build());
  EXPECT_EQ(cls.classes[3], RC::kNone);
  EXPECT_EQ(cls.classes[4], RC::kRetransmission);
  EXPECT_EQ(cls.classes[5], RC::kNone);
}

TEST(RetransmissionRateTest, Examples) {
  FlowBuilder clean;
  clean.Handshake(0, 100, 999);
  Segment1000(clean, 2000);
  const Flow c = clean.Build();
  EXPECT_EQ(RetransmissionRate(c, ClassifyRetransmissions(c)), 0.0);

  FlowBuilder third;
  third.Handshake(0, 100, 999);
  Segment1000(third, 2000);
  third.Add(false, 2001, tf::kAck, 2000, 101, 1000);
  Segment1000(third, 500'000);
  const Flow t = third.Build();
  EXPECT_EQ(RetransmissionRate(t, ClassifyRetransmissions(t)), 1000.0 / 3000.0);

  for (int n = 1; n <= 6; ++n) {
    FlowBuilder copies;
    copies.Handshake(0, 100, 999);
    for (int i = 0; i < n; ++i) Segment1000(copies, 2000 + i * 300'000);
    const Flow f = copies.Build();
    EXPECT_EQ(RetransmissionRate(f, ClassifyRetransmissions(f)),
              static_cast<double>(n - 1) / n);
  }

  FlowBuilder empty;
  empty.Handshake(0, 100, 999);
  const Flow e = empty.Build();
  EXPECT_EQ(RetransmissionRate(e, ClassifyRetransmissions(e)), 0.0);
}

TEST(GoodputTest, Examples) {
  FlowBuilder b;
  b.Add(true, 0, tf::kSyn, 1, 0, 0).ip_total_length = 450'000;
  Segment1000(b, 500'000);
  b.packets().back().ip_total_length = 450'000;
  Segment1000(b, 1'000'000);
  b.packets().back().ip_total_length = 100'000;
  const Flow f = b.Build();
  const auto cls = ClassifyRetransmissions(f);
  ASSERT_EQ(cls.classes[2], RC::kRetransmission);
  EXPECT_EQ(Goodput(f, cls), 7'200'000.0);
  EXPECT_EQ(MeanThroughput(f), 8'000'000.0);

  FlowBuilder clean;
  clean.Handshake(0, 100, 999);
  Segment1000(clean, 2000);
  const Flow c = clean.Build();
  EXPECT_EQ(Goodput(c, ClassifyRetransmissions(c)), MeanThroughput(c));
}

TEST(OptionUsageTest, FromCraftedCaptures) {
  FlowBuilder none;
  none.Handshake(0, 1, 1);
  const OptionUsage zero = CountOptionUsage(none.Build());
  EXPECT_EQ(zero.ecn, EcnUsage{});

  const OptionUsage ecn = CountOptionUsage(FromFixture("ecn_ce_ece.pcap"));
  EXPECT_EQ(ecn.ecn.ce, 1u);
  EXPECT_EQ(ecn.ecn.ece_flags, 1u);
  EXPECT_EQ(ecn.ecn.cwr_flags, 0u);

  const OptionUsage sack = CountOptionUsage(FromFixture("sack_three_blocks.pcap"));
  EXPECT_EQ(sack.sack.packets_with_sack_blocks, 1u);
  EXPECT_EQ(sack.sack.total_sack_blocks, 3u);
}

TEST(IndicatorsTest, TcpCapture) {
  const Flow f = FromFixture("ws_handshake.pcap");
  const PerfIndicators m = ComputeIndicators(f);
  EXPECT_FALSE(m.quic);
  EXPECT_EQ(m.rtt_sample_count, 2u);  // SYN->SYN-ACK and SYN-ACK->ACK
  ASSERT_TRUE(m.mean_rtt_ms.has_value());
  EXPECT_NEAR(*m.mean_rtt_ms, 50.0, 1e-6);
  EXPECT_NEAR(m.duration_s, 0.1, 1e-9);
}

TEST(IndicatorRecordTest, CsvRoundTrip) {
  std::mt19937_64 rng(3);
  std::vector<IndicatorRecord> records;
  for (int i = 0; i < 20; ++i) {
    IndicatorRecord r;
    r.config = i % 2 ? "WS" : "QUIC:aioquic";
    r.domain = "example" + std::to_string(i) + ".test";
    r.target_ip = "192.0.2." + std::to_string(i);
    r.vantage_point = "vp,\"quoted\"";
    r.run_id = "run-" + std::to_string(i);
    const Flow f = i % 2 ? testing::RandomTcpFlow(rng) : testing::RandomUdpFlow(rng);
    r.indicators = ComputeIndicators(f);
    records.push_back(r);
  }
  const auto path = std::filesystem::temp_directory_path() / "optperf_metrics_roundtrip.csv";
  WriteIndicatorCsv(path, records);
  const auto back = ReadIndicatorCsv(path);
  ASSERT_EQ(back.size(), records.size());
  for (size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(ToCsvRow(back[i]), ToCsvRow(records[i]));
    EXPECT_EQ(back[i].indicators.mean_throughput_bps, records[i].indicators.mean_throughput_bps);
  }
  const auto j = ToJson(records[1]);
  EXPECT_EQ(j.size(), IndicatorCsvHeader().size());
  EXPECT_EQ(j.begin().key(), "config");
  EXPECT_TRUE(ToJson(records[0])["mean_rtt_ms"].is_null());
  std::filesystem::remove(path);
}

// Property checks over random flows, against the brute-force restatement.

TEST(MetricsProperty, MatchesBruteForceOracle) {
  std::mt19937_64 rng(424242);
  for (int iter = 0; iter < 1000; ++iter) {
    const Flow f = testing::RandomTcpFlow(rng, 20 + static_cast<int>(rng() % 100));
    const auto cls = ClassifyRetransmissions(f);
    const auto labels = oracle::Labels(f);
    ASSERT_EQ(cls.classes.size(), labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
      ASSERT_EQ(static_cast<int>(cls.classes[i]), labels[i]) << "flow " << iter << " packet " << i;
    }
    const int64_t span = f.packets.back().timestamp_us - f.packets.front().timestamp_us;
    ASSERT_GT(span, 0);
    const long double all = oracle::SumLengths(f, nullptr);
    const long double good = oracle::SumLengths(f, &labels);
    EXPECT_DOUBLE_EQ(MeanThroughput(f), static_cast<double>(all * 8e6L / span));
    EXPECT_DOUBLE_EQ(Goodput(f, cls), static_cast<double>(good * 8e6L / span));

    const auto pairs = oracle::RttPairs(f);
    const auto samples = RttSamples(f);
    ASSERT_EQ(samples.size(), pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_EQ(samples[i].ms, (pairs[i].echoed_us - pairs[i].sent_us) / 1000.0);
      EXPECT_GT(samples[i].ms, 0.0);
      EXPECT_EQ(samples[i].direction == Direction::kFromInitiator, pairs[i].initiator_sent);
    }
  }
}

TEST(MetricsProperty, InvariantsHold) {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 300; ++iter) {
    const Flow f = testing::RandomTcpFlow(rng);
    const auto cls = ClassifyRetransmissions(f);
    const double rate = RetransmissionRate(f, cls);
    ASSERT_GE(rate, 0.0);
    ASSERT_LE(rate, 1.0);
    const double mean = MeanThroughput(f);
    const double good = Goodput(f, cls);
    ASSERT_LE(good, mean);
    ASSERT_EQ(good == mean, cls.count(RC::kNone) == cls.classes.size());

    // Uniform time shift.
    Flow shifted = f;
    for (auto& p : shifted.packets) p.timestamp_us += 123'456'789;
    ASSERT_EQ(MeanThroughput(shifted), mean);

    // Stretching every gap by k divides throughput by k.
    for (int k : {2, 3, 7}) {
      Flow stretched = f;
      const int64_t t0 = f.packets.front().timestamp_us;
      for (auto& p : stretched.packets) p.timestamp_us = t0 + (p.timestamp_us - t0) * k;
      ASSERT_NEAR(MeanThroughput(stretched), mean / k, mean * 1e-15);
    }

    // Stripping the timestamp option removes every sample.
    Flow no_ts = f;
    for (auto& p : no_ts.packets) p.tcp_options.timestamp.reset();
    ASSERT_TRUE(RttSamples(no_ts).empty());

    // Appending one more copy of an already-sent data segment never lowers
    // the rate.
    for (size_t i = 0; i < f.packets.size(); ++i) {
      const auto& p = f.packets[i];
      if (p.payload_len <= 1 || p.src != f.responder || p.has_flag(tf::kFin)) continue;
      Flow dup = f;
      auto copy = p;
      copy.timestamp_us = f.packets.back().timestamp_us + 1'000'000;
      dup.packets.push_back(copy);
      ASSERT_GE(RetransmissionRate(dup, ClassifyRetransmissions(dup)), rate);
      break;
    }
  }
}

TEST(MetricsProperty, QuicMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 500; ++iter) {
    const Flow f = testing::RandomUdpFlow(rng, 2 + static_cast<int>(rng() % 80));
    const int64_t span = f.duration_us();
    if (span == 0) {
      EXPECT_THROW(QuicThroughput(f), UndefinedThroughput);
      continue;
    }
    const long double all = oracle::SumLengths(f, nullptr);
    EXPECT_DOUBLE_EQ(QuicThroughput(f), static_cast<double>(all * 8e6L / span));
  }
}

}  // namespace
}  // namespace optperf::metrics

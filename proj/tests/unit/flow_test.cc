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

#include "flow_builder.h"
#include "optperf/capture/flow.h"
#include "optperf/capture/pcap.h"

namespace optperf::capture {
namespace {

using testing::Ep;
using testing::FlowBuilder;

TEST(DemuxFlowsTest, SingleTupleIsOneFlow) {
  FlowBuilder b;
  b.Handshake(0, 100, 900);
  for (int i = 0; i < 7; ++i) b.Add(false, 2000 + i * 10, tcp_flags::kAck, 901 + i * 100, 101, 100);
  const auto flows = DemuxFlows(b.packets());
  ASSERT_EQ(flows.size(), 1u);
  EXPECT_EQ(flows[0].packets.size(), 10u);
  EXPECT_TRUE(flows[0].handshake_observed);
  EXPECT_EQ(flows[0].initiator, Ep("10.0.0.1", 40000));
}

TEST(DemuxFlowsTest, InterleavedConnectionsPartition) {
  FlowBuilder a(Ep("10.0.0.1", 40000), Ep("10.0.0.2", 443));
  FlowBuilder c(Ep("10.0.0.1", 40001), Ep("10.0.0.2", 443));
  a.Handshake(0, 1, 1);
  c.Handshake(10, 5, 5);
  a.Add(false, 3000, tcp_flags::kAck, 2, 2, 500);
  c.Add(false, 3001, tcp_flags::kAck, 6, 6, 500);
  std::vector<PacketRecord> all = a.packets();
  all.insert(all.end(), c.packets().begin(), c.packets().end());
  const auto flows = DemuxFlows(all);
  ASSERT_EQ(flows.size(), 2u);
  EXPECT_EQ(flows[0].packets.size() + flows[1].packets.size(), all.size());
  EXPECT_EQ(flows[0].initiator.port, 40000);
  EXPECT_EQ(flows[1].initiator.port, 40001);
}

TEST(DemuxFlowsTest, WindowScaleNegotiationFromCapture) {
  const Capture cap = ReadCaptureFile(std::filesystem::path(OPTPERF_TEST_DATA_DIR) /
                                      "capture" / "ws_handshake.pcap");
  const auto flows = DemuxFlows(cap.packets);
  ASSERT_EQ(flows.size(), 1u);
  const auto& n = flows[0].negotiated;
  EXPECT_EQ(n.initiator.window_scale, 14);
  EXPECT_EQ(n.responder.window_scale, 7);
  EXPECT_TRUE(n.window_scaling_active());
  EXPECT_TRUE(n.sack_active());
  EXPECT_TRUE(n.timestamps_active());
  EXPECT_EQ(n.initiator.mss, 1460);
  EXPECT_FALSE(n.ecn);
}

TEST(DemuxFlowsTest, EcnNegotiatedOnlyWithEceWithoutCwr) {
  const Capture cap = ReadCaptureFile(std::filesystem::path(OPTPERF_TEST_DATA_DIR) /
                                      "capture" / "ecn_ce_ece.pcap");
  const auto flows = DemuxFlows(cap.packets);
  ASSERT_EQ(flows.size(), 1u);
  EXPECT_TRUE(flows[0].negotiated.ecn);

  FlowBuilder b;
  b.Add(true, 0, tcp_flags::kSyn | tcp_flags::kEce | tcp_flags::kCwr, 1, 0, 0);
  b.Add(false, 10, tcp_flags::kSyn | tcp_flags::kAck | tcp_flags::kEce | tcp_flags::kCwr, 1, 2, 0);
  EXPECT_FALSE(b.Build().negotiated.ecn);
}

TEST(DemuxFlowsTest, NegotiationIgnoresOptionsOutsideHandshake) {
  FlowBuilder b;
  b.Handshake(0, 1, 1);
  b.Add(true, 5000, tcp_flags::kAck, 2, 2, 0).tcp_options.window_scale = 9;
  const Flow f = b.Build();
  EXPECT_FALSE(f.negotiated.initiator.window_scale.has_value());
  EXPECT_FALSE(f.negotiated.window_scaling_active());
}

TEST(DemuxFlowsTest, MidstreamCaptureIsHandshakeAbsent) {
  FlowBuilder b;
  b.Add(false, 0, tcp_flags::kAck, 5000, 1, 1000);
  b.Add(true, 10, tcp_flags::kAck, 1, 6000, 0);
  const Flow f = b.Build();
  EXPECT_FALSE(f.handshake_observed);
  EXPECT_EQ(f.initiator, Ep("10.0.0.2", 443));
}

TEST(DemuxFlowsTest, SynAckFirstMakesItsDestinationTheInitiator) {
  FlowBuilder b;
  b.Add(false, 0, tcp_flags::kSyn | tcp_flags::kAck, 900, 101, 0);
  b.Add(true, 10, tcp_flags::kAck, 101, 901, 0);
  EXPECT_EQ(b.Build().initiator, Ep("10.0.0.1", 40000));
}

TEST(DemuxFlowsTest, PortReuseAfterFinOpensNewFlow) {
  FlowBuilder b;
  b.Handshake(0, 1, 1);
  b.Add(true, 2000, tcp_flags::kFin | tcp_flags::kAck, 2, 2, 0);
  b.Add(false, 2100, tcp_flags::kFin | tcp_flags::kAck, 2, 3, 0);
  b.Add(true, 2200, tcp_flags::kAck, 3, 3, 0);
  b.Handshake(10'000, 77, 88);
  const auto flows = DemuxFlows(b.packets());
  ASSERT_EQ(flows.size(), 2u);
  EXPECT_EQ(flows[0].packets.size(), 6u);
  EXPECT_EQ(flows[1].packets.size(), 3u);
  EXPECT_TRUE(flows[1].handshake_observed);
}

TEST(DemuxFlowsTest, SynRetransmissionDoesNotSplitOpenFlow) {
  FlowBuilder b;
  b.Add(true, 0, tcp_flags::kSyn, 1, 0, 0);
  b.Add(true, 1'000'000, tcp_flags::kSyn, 1, 0, 0);
  b.Add(false, 1'000'500, tcp_flags::kSyn | tcp_flags::kAck, 9, 2, 0);
  EXPECT_EQ(DemuxFlows(b.packets()).size(), 1u);
}

TEST(DemuxFlowsTest, UnsortedInputIsSorted) {
  FlowBuilder b;
  b.Add(true, 30, tcp_flags::kAck, 3, 1, 0);
  b.Add(true, 10, tcp_flags::kAck, 1, 1, 0);
  b.Add(true, 20, tcp_flags::kAck, 2, 1, 0);
  const auto flows = DemuxFlows(b.packets());
  ASSERT_EQ(flows.size(), 1u);
  EXPECT_EQ(flows[0].packets[0].tcp_seq, 1u);
  EXPECT_EQ(flows[0].packets[2].tcp_seq, 3u);
}

TEST(DemuxFlowsTest, UdpFlowKeyedSeparatelyFromTcp) {
  FlowBuilder b;
  b.Udp(true, 0, 1200);
  b.Add(true, 5, tcp_flags::kSyn, 1, 0, 0);
  b.Udp(false, 10, 1200);
  const auto flows = DemuxFlows(b.packets());
  ASSERT_EQ(flows.size(), 2u);
  EXPECT_FALSE(flows[0].is_tcp());
  EXPECT_EQ(flows[0].packets.size(), 2u);
  EXPECT_FALSE(flows[0].handshake_observed);
}

// Random multi-connection traffic for the structural properties.
std::vector<PacketRecord> RandomTraffic(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> conn(0, 5);
  std::uniform_int_distribution<int> gap(0, 3);
  std::bernoulli_distribution coin(0.5);
  std::vector<PacketRecord> out;
  int64_t t = 0;
  for (int i = 0; i < n; ++i) {
    const int c = conn(rng);
    FlowBuilder b(Ep("10.0.0.1", static_cast<uint16_t>(40000 + c)), Ep("10.0.0.2", 443));
    t += gap(rng);
    uint8_t flags = tcp_flags::kAck;
    const int r = static_cast<int>(rng() % 20);
    if (r == 0) flags = tcp_flags::kSyn;
    if (r == 1) flags = tcp_flags::kSyn | tcp_flags::kAck;
    if (r == 2) flags = tcp_flags::kFin | tcp_flags::kAck;
    if (c == 5) {
      out.push_back(b.Udp(coin(rng), t, 100));
    } else {
      out.push_back(b.Add(coin(rng), t, flags, static_cast<uint32_t>(rng()), 0, 10));
    }
    out.back().frame_index = static_cast<uint32_t>(i);
  }
  return out;
}

Endpoint Relabel(const Endpoint& e) {
  return e.address == *IpAddress::Parse("10.0.0.1")
             ? Endpoint{*IpAddress::Parse("10.0.0.2"), e.port}
             : Endpoint{*IpAddress::Parse("10.0.0.1"), e.port};
}

TEST(DemuxFlowsProperty, PartitionSymmetryDeterminism) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    const auto packets = RandomTraffic(rng, 200);
    const auto flows = DemuxFlows(packets);

    size_t total = 0;
    std::vector<int> seen(packets.size(), 0);
    for (const auto& f : flows) {
      total += f.packets.size();
      for (size_t i = 1; i < f.packets.size(); ++i) {
        ASSERT_LE(f.packets[i - 1].timestamp_us, f.packets[i].timestamp_us);
      }
      for (const auto& p : f.packets) {
        ASSERT_EQ(FlowKey::Of(p), f.key);
        ++seen[p.frame_index];
      }
    }
    ASSERT_EQ(total, packets.size());
    for (int s : seen) ASSERT_EQ(s, 1);

    const auto again = DemuxFlows(packets);
    ASSERT_EQ(again.size(), flows.size());
    for (size_t i = 0; i < flows.size(); ++i) {
      ASSERT_EQ(again[i].key, flows[i].key);
      ASSERT_EQ(again[i].packets.size(), flows[i].packets.size());
      ASSERT_EQ(again[i].negotiated, flows[i].negotiated);
    }

    // Swap the two hosts' addresses: same flows, initiators swapped too.
    auto swapped = packets;
    for (auto& p : swapped) {
      p.src = Relabel(p.src);
      p.dst = Relabel(p.dst);
    }
    const auto mirrored = DemuxFlows(swapped);
    ASSERT_EQ(mirrored.size(), flows.size());
    for (size_t i = 0; i < flows.size(); ++i) {
      ASSERT_EQ(mirrored[i].packets.size(), flows[i].packets.size());
      ASSERT_EQ(mirrored[i].initiator, Relabel(flows[i].initiator));
      ASSERT_EQ(mirrored[i].negotiated, flows[i].negotiated);
      ASSERT_EQ(mirrored[i].handshake_observed, flows[i].handshake_observed);
      for (size_t j = 0; j < flows[i].packets.size(); ++j) {
        ASSERT_EQ(mirrored[i].packets[j].frame_index, flows[i].packets[j].frame_index);
      }
    }
  }
}

}  // namespace
}  // namespace optperf::capture

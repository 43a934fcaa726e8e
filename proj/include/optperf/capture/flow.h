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

#ifndef OPTPERF_CAPTURE_FLOW_H_
#define OPTPERF_CAPTURE_FLOW_H_

#include <optional>
#include <vector>

#include "optperf/capture/packet.h"

namespace optperf::capture {

// Transport 5-tuple in canonical order: `low` <= `high`, so both directions
// of a connection produce the same key.
struct FlowKey {
  Transport transport = Transport::kTcp;
  Endpoint low;
  Endpoint high;

  static FlowKey Of(const PacketRecord& p);
  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
  friend bool operator==(const FlowKey&, const FlowKey&) = default;
};

// Options one endpoint advertised in its SYN (or SYN-ACK).
struct AdvertisedOptions {
  std::optional<uint8_t> window_scale;
  bool sack_permitted = false;
  bool timestamps = false;
  std::optional<uint16_t> mss;

  friend bool operator==(const AdvertisedOptions&, const AdvertisedOptions&) = default;
};

struct NegotiatedOptions {
  AdvertisedOptions initiator;  // from the SYN
  AdvertisedOptions responder;  // from the SYN-ACK
  // SYN carried ECE+CWR and the SYN-ACK answered with ECE but not CWR.
  bool ecn = false;
  bool syn_seen = false;
  bool syn_ack_seen = false;

  // Window scaling takes effect only when both sides sent the option.
  bool window_scaling_active() const {
    return initiator.window_scale.has_value() && responder.window_scale.has_value();
  }
  bool sack_active() const { return initiator.sack_permitted && responder.sack_permitted; }
  bool timestamps_active() const { return initiator.timestamps && responder.timestamps; }

  friend bool operator==(const NegotiatedOptions&, const NegotiatedOptions&) = default;
};

enum class Direction : uint8_t { kFromInitiator, kFromResponder };

struct Flow {
  FlowKey key;
  Endpoint initiator;  // sender of the first SYN, or of the first packet
  Endpoint responder;
  std::vector<PacketRecord> packets;  // non-decreasing timestamps
  NegotiatedOptions negotiated;
  // False when no SYN was observed (capture started mid-connection) and for
  // UDP flows.
  bool handshake_observed = false;

  bool is_tcp() const { return key.transport == Transport::kTcp; }
  Direction DirectionOf(const PacketRecord& p) const {
    return p.src == initiator ? Direction::kFromInitiator : Direction::kFromResponder;
  }
  int64_t duration_us() const {
    return packets.empty() ? 0 : packets.back().timestamp_us - packets.front().timestamp_us;
  }
};

// Partitions packets into flows, ordered by each flow's first packet. Packets
// are stably sorted by timestamp first when they arrive out of order. A SYN
// (without ACK) on a key whose current flow has seen FIN or RST starts a new
// flow for that key.
std::vector<Flow> DemuxFlows(std::vector<PacketRecord> packets);

}  // namespace optperf::capture

#endif  // OPTPERF_CAPTURE_FLOW_H_

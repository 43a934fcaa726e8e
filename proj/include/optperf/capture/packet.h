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

#ifndef OPTPERF_CAPTURE_PACKET_H_
#define OPTPERF_CAPTURE_PACKET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optperf/common/ip_address.h"

namespace optperf::capture {

// Two-bit ECN field of the IP header (RFC 3168 numbering).
enum class EcnCodepoint : uint8_t { kNotEct = 0, kEct1 = 1, kEct0 = 2, kCe = 3 };

enum class Transport : uint8_t { kTcp = 6, kUdp = 17 };

namespace tcp_flags {
inline constexpr uint8_t kFin = 0x01;
inline constexpr uint8_t kSyn = 0x02;
inline constexpr uint8_t kRst = 0x04;
inline constexpr uint8_t kPsh = 0x08;
inline constexpr uint8_t kAck = 0x10;
inline constexpr uint8_t kUrg = 0x20;
inline constexpr uint8_t kEce = 0x40;
inline constexpr uint8_t kCwr = 0x80;
}  // namespace tcp_flags

// Half-open sequence range [left, right) as carried on the wire.
struct SackBlock {
  uint32_t left = 0;
  uint32_t right = 0;
  friend bool operator==(const SackBlock&, const SackBlock&) = default;
};

struct TcpTimestamp {
  uint32_t tsval = 0;
  uint32_t tsecr = 0;
  friend bool operator==(const TcpTimestamp&, const TcpTimestamp&) = default;
};

struct TcpOptions {
  std::optional<uint16_t> mss;
  std::optional<uint8_t> window_scale;  // shift count, clamped to [0, 14]
  bool sack_permitted = false;
  std::vector<SackBlock> sack_blocks;
  std::optional<TcpTimestamp> timestamp;

  friend bool operator==(const TcpOptions&, const TcpOptions&) = default;
};

// One captured IPv4/IPv6 packet carrying a TCP or UDP header.
struct PacketRecord {
  // Microseconds since the Unix epoch.
  int64_t timestamp_us = 0;
  // IPv4 total-length field; for IPv6 the payload length plus 40.
  uint32_t ip_total_length = 0;
  EcnCodepoint ecn = EcnCodepoint::kNotEct;
  Transport transport = Transport::kTcp;
  Endpoint src;
  Endpoint dst;

  uint32_t tcp_seq = 0;
  uint32_t tcp_ack = 0;
  uint8_t tcp_flags = 0;
  uint16_t tcp_window = 0;
  // Transport payload bytes, derived from header length fields so that it
  // stays meaningful for snap-length truncated packets. For UDP this is the
  // datagram payload.
  uint32_t payload_len = 0;
  TcpOptions tcp_options;

  // Set when the capture's snap length cut the packet short.
  bool truncated = false;
  // 0-based index of the frame in the source capture.
  uint32_t frame_index = 0;

  bool is_tcp() const { return transport == Transport::kTcp; }
  bool has_flag(uint8_t flag) const { return (tcp_flags & flag) != 0; }
  double timestamp_seconds() const { return timestamp_us / 1e6; }
};

std::string FlagsToString(uint8_t flags);

}  // namespace optperf::capture

#endif  // OPTPERF_CAPTURE_PACKET_H_

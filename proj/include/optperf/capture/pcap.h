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

#ifndef OPTPERF_CAPTURE_PCAP_H_
#define OPTPERF_CAPTURE_PCAP_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <vector>

#include "optperf/capture/packet.h"

namespace optperf::capture {

// Link-layer header types accepted by the reader.
enum class LinkType : uint32_t {
  kEthernet = 1,
  kRaw = 101,
  kLinuxSll = 113,
};

class CaptureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseStats {
  size_t frames = 0;
  size_t skipped_non_ip = 0;         // ARP, LLDP, ...
  size_t skipped_non_transport = 0;  // ICMP, non-first fragments, ...
  size_t skipped_malformed = 0;
  size_t truncated = 0;              // decoded but cut by the snap length

  size_t skipped() const {
    return skipped_non_ip + skipped_non_transport + skipped_malformed;
  }
};

struct Capture {
  LinkType link_type = LinkType::kEthernet;
  uint32_t snaplen = 0;
  bool nanosecond = false;
  std::vector<PacketRecord> packets;
  ParseStats stats;
};

// Decodes a classic pcap byte stream (microsecond or nanosecond variant,
// either byte order). Throws CaptureError on a malformed global header or an
// unsupported link type; a malformed frame is skipped and counted.
Capture ParseCapture(std::span<const uint8_t> bytes);
Capture ReadCaptureFile(const std::filesystem::path& path);

// Decodes one network-layer packet (starting at the IP header). Returns
// nullopt for non-transport or malformed input; `stats` is updated.
std::optional<PacketRecord> DecodeIpPacket(std::span<const uint8_t> data,
                                           uint32_t original_length,
                                           ParseStats& stats);

// Writes classic little-endian pcap files.
class PcapWriter {
 public:
  PcapWriter(const std::filesystem::path& path, LinkType link_type,
             uint32_t snaplen = 262144, bool nanosecond = false);
  // In-memory variant; bytes are appended to `sink`.
  PcapWriter(std::vector<uint8_t>* sink, LinkType link_type,
             uint32_t snaplen = 262144, bool nanosecond = false);

  PcapWriter(const PcapWriter&) = delete;
  PcapWriter& operator=(const PcapWriter&) = delete;

  // `frame` is truncated to the snap length; `original_length` defaults to
  // the frame size.
  void Write(int64_t timestamp_ns, std::span<const uint8_t> frame,
             uint32_t original_length = 0);
  void Flush();
  size_t frames_written() const { return frames_; }

 private:
  void WriteHeader();
  void Append(std::span<const uint8_t> bytes);

  std::ofstream file_;
  std::vector<uint8_t>* sink_ = nullptr;
  LinkType link_type_;
  uint32_t snaplen_;
  bool nanosecond_;
  size_t frames_ = 0;
};

// Serializes a record into an IP packet (IPv4 or IPv6 per the source
// address) whose header fields, TCP options and length fields reproduce the
// record. The payload is zero-filled; when `include_payload` is false the
// bytes after the transport header are omitted, as a snap-length cut would.
std::vector<uint8_t> BuildIpPacket(const PacketRecord& record,
                                   bool include_payload = true);

}  // namespace optperf::capture

#endif  // OPTPERF_CAPTURE_PCAP_H_

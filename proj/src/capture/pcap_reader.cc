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

#include <algorithm>
#include <cstring>
#include <iterator>

#include "optperf/capture/pcap.h"

namespace optperf::capture {
namespace {

constexpr uint32_t kMagicMicro = 0xa1b2c3d4;
constexpr uint32_t kMagicNano = 0xa1b23c4d;
constexpr size_t kGlobalHeaderSize = 24;
constexpr size_t kRecordHeaderSize = 16;

uint16_t Be16(const uint8_t* p) { return static_cast<uint16_t>(p[0] << 8 | p[1]); }
uint32_t Be32(const uint8_t* p) {
  return uint32_t{p[0]} << 24 | uint32_t{p[1]} << 16 | uint32_t{p[2]} << 8 | p[3];
}

class FieldReader {
 public:
  explicit FieldReader(bool swapped) : swapped_(swapped) {}
  uint32_t U32(const uint8_t* p) const {
    uint32_t v;
    std::memcpy(&v, p, 4);
    return swapped_ ? __builtin_bswap32(v) : v;
  }
  uint16_t U16(const uint8_t* p) const {
    uint16_t v;
    std::memcpy(&v, p, 2);
    return swapped_ ? __builtin_bswap16(v) : v;
  }

 private:
  bool swapped_;
};

// Serial-number comparison: true when a precedes b.
bool SeqLess(uint32_t a, uint32_t b) { return static_cast<int32_t>(a - b) < 0; }

void ParseTcpOptions(std::span<const uint8_t> opts, TcpOptions& out) {
  size_t i = 0;
  while (i < opts.size()) {
    const uint8_t kind = opts[i];
    if (kind == 0) break;
    if (kind == 1) {
      ++i;
      continue;
    }
    if (i + 1 >= opts.size()) break;
    const uint8_t len = opts[i + 1];
    if (len < 2 || i + len > opts.size()) break;
    const uint8_t* p = opts.data() + i;
    switch (kind) {
      case 2:
        if (len == 4) out.mss = Be16(p + 2);
        break;
      case 3:
        if (len == 3) out.window_scale = std::min<uint8_t>(p[2], 14);
        break;
      case 4:
        if (len == 2) out.sack_permitted = true;
        break;
      case 5:
        if ((len - 2) % 8 == 0) {
          for (size_t b = 2; b + 8 <= len; b += 8) {
            SackBlock blk{Be32(p + b), Be32(p + b + 4)};
            if (SeqLess(blk.left, blk.right)) out.sack_blocks.push_back(blk);
          }
        }
        break;
      case 8:
        if (len == 10) out.timestamp = TcpTimestamp{Be32(p + 2), Be32(p + 6)};
        break;
      default:
        break;
    }
    i += len;
  }
}

// Decodes the transport header found at `l4` (captured bytes) for a packet
// whose transport segment is `l4_length` bytes long on the wire.
bool DecodeTransport(uint8_t proto, std::span<const uint8_t> l4,
                     uint32_t l4_length, PacketRecord& rec, ParseStats& stats) {
  if (proto == 6) {
    if (l4.size() < 20) {
      ++stats.skipped_malformed;
      return false;
    }
    const uint8_t* p = l4.data();
    rec.transport = Transport::kTcp;
    rec.src.port = Be16(p);
    rec.dst.port = Be16(p + 2);
    rec.tcp_seq = Be32(p + 4);
    rec.tcp_ack = Be32(p + 8);
    const uint32_t header_len = (p[12] >> 4) * 4u;
    rec.tcp_flags = p[13];
    rec.tcp_window = Be16(p + 14);
    if (header_len < 20 || header_len > l4_length) {
      ++stats.skipped_malformed;
      return false;
    }
    rec.payload_len = l4_length - header_len;
    const size_t captured_opts = std::min<size_t>(header_len, l4.size());
    if (captured_opts > 20) {
      ParseTcpOptions(l4.subspan(20, captured_opts - 20), rec.tcp_options);
    }
    return true;
  }
  if (proto == 17) {
    if (l4.size() < 8) {
      ++stats.skipped_malformed;
      return false;
    }
    const uint8_t* p = l4.data();
    rec.transport = Transport::kUdp;
    rec.src.port = Be16(p);
    rec.dst.port = Be16(p + 2);
    const uint32_t udp_len = Be16(p + 4);
    // Zero length appears on IPv6 jumbograms; fall back to the IP length.
    const uint32_t len = udp_len >= 8 && udp_len <= l4_length ? udp_len : l4_length;
    if (len < 8) {
      ++stats.skipped_malformed;
      return false;
    }
    rec.payload_len = len - 8;
    return true;
  }
  ++stats.skipped_non_transport;
  return false;
}

std::optional<PacketRecord> DecodeIpv4(std::span<const uint8_t> d,
                                       ParseStats& stats) {
  if (d.size() < 20) {
    ++stats.skipped_malformed;
    return std::nullopt;
  }
  const uint32_t ihl = (d[0] & 0x0f) * 4u;
  const uint32_t total = Be16(d.data() + 2);
  if (ihl < 20 || total < ihl || d.size() < ihl) {
    ++stats.skipped_malformed;
    return std::nullopt;
  }
  const uint16_t frag = Be16(d.data() + 6);
  if ((frag & 0x1fff) != 0) {
    ++stats.skipped_non_transport;
    return std::nullopt;
  }
  PacketRecord rec;
  rec.ip_total_length = total;
  rec.ecn = static_cast<EcnCodepoint>(d[1] & 0x03);
  rec.src.address = IpAddress::FromBytes(IpFamily::kV4, d.subspan(12, 4));
  rec.dst.address = IpAddress::FromBytes(IpFamily::kV4, d.subspan(16, 4));
  const auto l4 = d.subspan(ihl, std::min<size_t>(d.size(), total) - ihl);
  if (!DecodeTransport(d[9], l4, total - ihl, rec, stats)) return std::nullopt;
  return rec;
}

bool IsIpv6ExtensionHeader(uint8_t next) {
  return next == 0 || next == 43 || next == 60 || next == 51 || next == 44 ||
         next == 135;
}

std::optional<PacketRecord> DecodeIpv6(std::span<const uint8_t> d,
                                       ParseStats& stats) {
  if (d.size() < 40) {
    ++stats.skipped_malformed;
    return std::nullopt;
  }
  const uint32_t payload = Be16(d.data() + 4);
  if (payload == 0) {
    ++stats.skipped_malformed;  // jumbograms are not supported
    return std::nullopt;
  }
  PacketRecord rec;
  rec.ip_total_length = payload + 40;
  const uint8_t traffic_class = static_cast<uint8_t>(((d[0] & 0x0f) << 4) | (d[1] >> 4));
  rec.ecn = static_cast<EcnCodepoint>(traffic_class & 0x03);
  rec.src.address = IpAddress::FromBytes(IpFamily::kV6, d.subspan(8, 16));
  rec.dst.address = IpAddress::FromBytes(IpFamily::kV6, d.subspan(24, 16));

  uint8_t next = d[6];
  size_t offset = 40;
  while (IsIpv6ExtensionHeader(next)) {
    if (offset + 8 > d.size() || offset + 8 > rec.ip_total_length) {
      ++stats.skipped_malformed;
      return std::nullopt;
    }
    if (next == 44) {
      const uint16_t frag = Be16(d.data() + offset + 2);
      if ((frag & 0xfff8) != 0) {
        ++stats.skipped_non_transport;
        return std::nullopt;
      }
      next = d[offset];
      offset += 8;
      continue;
    }
    const size_t len = next == 51 ? (d[offset + 1] + 2u) * 4u : (d[offset + 1] + 1u) * 8u;
    next = d[offset];
    offset += len;
  }
  if (offset > rec.ip_total_length || offset > d.size()) {
    ++stats.skipped_malformed;
    return std::nullopt;
  }
  const size_t end = std::min<size_t>(d.size(), rec.ip_total_length);
  const auto l4 = d.subspan(offset, end - offset);
  if (!DecodeTransport(next, l4, rec.ip_total_length - static_cast<uint32_t>(offset),
                       rec, stats)) {
    return std::nullopt;
  }
  return rec;
}

// Strips Ethernet / 802.1Q / 802.1ad headers. Returns the ethertype and
// advances `frame` to the network header.
std::optional<uint16_t> StripEthernet(std::span<const uint8_t>& frame) {
  if (frame.size() < 14) return std::nullopt;
  uint16_t type = Be16(frame.data() + 12);
  size_t off = 14;
  while (type == 0x8100 || type == 0x88a8 || type == 0x9100) {
    if (frame.size() < off + 4) return std::nullopt;
    type = Be16(frame.data() + off + 2);
    off += 4;
  }
  frame = frame.subspan(off);
  return type;
}

std::optional<uint16_t> StripLinuxSll(std::span<const uint8_t>& frame) {
  if (frame.size() < 16) return std::nullopt;
  uint16_t type = Be16(frame.data() + 14);
  size_t off = 16;
  while (type == 0x8100 || type == 0x88a8) {
    if (frame.size() < off + 4) return std::nullopt;
    type = Be16(frame.data() + off + 2);
    off += 4;
  }
  frame = frame.subspan(off);
  return type;
}

}  // namespace

std::optional<PacketRecord> DecodeIpPacket(std::span<const uint8_t> data,
                                           uint32_t original_length,
                                           ParseStats& stats) {
  if (data.empty()) {
    ++stats.skipped_malformed;
    return std::nullopt;
  }
  std::optional<PacketRecord> rec;
  const uint8_t version = data[0] >> 4;
  if (version == 4) {
    rec = DecodeIpv4(data, stats);
  } else if (version == 6) {
    rec = DecodeIpv6(data, stats);
  } else {
    ++stats.skipped_non_ip;
    return std::nullopt;
  }
  if (rec && data.size() < original_length) {
    rec->truncated = true;
    ++stats.truncated;
  }
  return rec;
}

Capture ParseCapture(std::span<const uint8_t> bytes) {
  if (bytes.size() < kGlobalHeaderSize) {
    throw CaptureError("capture shorter than the pcap global header");
  }
  uint32_t magic;
  std::memcpy(&magic, bytes.data(), 4);
  bool swapped = false;
  Capture cap;
  if (magic == kMagicMicro || magic == kMagicNano) {
    cap.nanosecond = magic == kMagicNano;
  } else if (__builtin_bswap32(magic) == kMagicMicro ||
             __builtin_bswap32(magic) == kMagicNano) {
    swapped = true;
    cap.nanosecond = __builtin_bswap32(magic) == kMagicNano;
  } else {
    throw CaptureError("not a pcap capture (bad magic)");
  }
  const FieldReader rd(swapped);
  const uint16_t major = rd.U16(bytes.data() + 4);
  if (major != 2) throw CaptureError("unsupported pcap major version");
  cap.snaplen = rd.U32(bytes.data() + 16);
  const uint32_t network = rd.U32(bytes.data() + 20) & 0x0fffffff;
  switch (network) {
    case 1:
    case 101:
    case 113:
      cap.link_type = static_cast<LinkType>(network);
      break;
    default:
      throw CaptureError("unsupported link type " + std::to_string(network) +
                         " (expected Ethernet, raw IP or Linux cooked)");
  }

  size_t off = kGlobalHeaderSize;
  uint32_t index = 0;
  while (off + kRecordHeaderSize <= bytes.size()) {
    const uint8_t* h = bytes.data() + off;
    const int64_t sec = rd.U32(h);
    const int64_t frac = rd.U32(h + 4);
    const uint32_t incl = rd.U32(h + 8);
    const uint32_t orig = rd.U32(h + 12);
    off += kRecordHeaderSize;
    ++cap.stats.frames;
    const uint32_t frame_index = index++;
    if (incl > bytes.size() - off) {
      // The final record is cut short; nothing after it can be trusted.
      ++cap.stats.skipped_malformed;
      break;
    }
    std::span<const uint8_t> frame = bytes.subspan(off, incl);
    off += incl;

    const size_t link_len_before = frame.size();
    std::optional<uint16_t> ethertype;
    if (cap.link_type == LinkType::kEthernet) {
      ethertype = StripEthernet(frame);
    } else if (cap.link_type == LinkType::kLinuxSll) {
      ethertype = StripLinuxSll(frame);
    } else if (!frame.empty()) {
      ethertype = (frame[0] >> 4) == 6 ? 0x86dd : 0x0800;
    }
    if (!ethertype) {
      ++cap.stats.skipped_malformed;
      continue;
    }
    if (*ethertype != 0x0800 && *ethertype != 0x86dd) {
      ++cap.stats.skipped_non_ip;
      continue;
    }
    const uint32_t link_header = static_cast<uint32_t>(link_len_before - frame.size());
    const uint32_t ip_orig = orig > link_header ? orig - link_header : 0;
    auto rec = DecodeIpPacket(frame, ip_orig, cap.stats);
    if (!rec) continue;
    rec->timestamp_us = sec * 1'000'000 + (cap.nanosecond ? frac / 1000 : frac);
    rec->frame_index = frame_index;
    cap.packets.push_back(std::move(*rec));
  }
  if (off != bytes.size() && off + kRecordHeaderSize > bytes.size() &&
      off < bytes.size()) {
    ++cap.stats.skipped_malformed;  // dangling partial record header
  }
  return cap;
}

Capture ReadCaptureFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaptureError("cannot open capture " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return ParseCapture(bytes);
}

}  // namespace optperf::capture

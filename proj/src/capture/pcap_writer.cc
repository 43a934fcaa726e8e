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

#include "optperf/capture/pcap.h"

namespace optperf::capture {
namespace {

void PutLe32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void PutLe16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}
void PutBe16(uint8_t* p, uint16_t v) {
  p[0] = static_cast<uint8_t>(v >> 8);
  p[1] = static_cast<uint8_t>(v);
}
void PutBe32(uint8_t* p, uint32_t v) {
  p[0] = static_cast<uint8_t>(v >> 24);
  p[1] = static_cast<uint8_t>(v >> 16);
  p[2] = static_cast<uint8_t>(v >> 8);
  p[3] = static_cast<uint8_t>(v);
}

std::vector<uint8_t> EncodeTcpOptions(const TcpOptions& o) {
  std::vector<uint8_t> b;
  if (o.mss) {
    b.insert(b.end(), {2, 4, static_cast<uint8_t>(*o.mss >> 8),
                       static_cast<uint8_t>(*o.mss)});
  }
  if (o.sack_permitted) b.insert(b.end(), {4, 2});
  if (o.timestamp) {
    b.insert(b.end(), {8, 10, 0, 0, 0, 0, 0, 0, 0, 0});
    PutBe32(&b[b.size() - 8], o.timestamp->tsval);
    PutBe32(&b[b.size() - 4], o.timestamp->tsecr);
  }
  if (o.window_scale) b.insert(b.end(), {1, 3, 3, *o.window_scale});
  if (!o.sack_blocks.empty()) {
    // Whatever fits in the 40-byte option space.
    const size_t room = b.size() + 4 < 40 ? (40 - b.size() - 4) / 8 : 0;
    const size_t n = std::min(o.sack_blocks.size(), room);
    if (n > 0) b.insert(b.end(), {1, 1, 5, static_cast<uint8_t>(2 + 8 * n)});
    for (size_t i = 0; i < n; ++i) {
      b.resize(b.size() + 8);
      PutBe32(&b[b.size() - 8], o.sack_blocks[i].left);
      PutBe32(&b[b.size() - 4], o.sack_blocks[i].right);
    }
  }
  while (b.size() % 4) b.push_back(0);
  return b;
}

}  // namespace

PcapWriter::PcapWriter(const std::filesystem::path& path, LinkType link_type,
                       uint32_t snaplen, bool nanosecond)
    : file_(path, std::ios::binary | std::ios::trunc),
      link_type_(link_type),
      snaplen_(snaplen),
      nanosecond_(nanosecond) {
  if (!file_) throw CaptureError("cannot create capture file " + path.string());
  WriteHeader();
}

PcapWriter::PcapWriter(std::vector<uint8_t>* sink, LinkType link_type,
                       uint32_t snaplen, bool nanosecond)
    : sink_(sink), link_type_(link_type), snaplen_(snaplen), nanosecond_(nanosecond) {
  WriteHeader();
}

void PcapWriter::Append(std::span<const uint8_t> bytes) {
  if (sink_) {
    sink_->insert(sink_->end(), bytes.begin(), bytes.end());
  } else {
    file_.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
  }
}

void PcapWriter::WriteHeader() {
  std::vector<uint8_t> h;
  PutLe32(h, nanosecond_ ? 0xa1b23c4d : 0xa1b2c3d4);
  PutLe16(h, 2);
  PutLe16(h, 4);
  PutLe32(h, 0);
  PutLe32(h, 0);
  PutLe32(h, snaplen_);
  PutLe32(h, static_cast<uint32_t>(link_type_));
  Append(h);
}

void PcapWriter::Write(int64_t timestamp_ns, std::span<const uint8_t> frame,
                       uint32_t original_length) {
  const uint32_t orig = original_length ? original_length
                                        : static_cast<uint32_t>(frame.size());
  const uint32_t incl = std::min<uint32_t>(static_cast<uint32_t>(frame.size()), snaplen_);
  std::vector<uint8_t> h;
  h.reserve(16 + incl);
  PutLe32(h, static_cast<uint32_t>(timestamp_ns / 1'000'000'000));
  const int64_t frac = timestamp_ns % 1'000'000'000;
  PutLe32(h, static_cast<uint32_t>(nanosecond_ ? frac : frac / 1000));
  PutLe32(h, incl);
  PutLe32(h, orig);
  h.insert(h.end(), frame.begin(), frame.begin() + incl);
  Append(h);
  ++frames_;
}

void PcapWriter::Flush() {
  if (!sink_) file_.flush();
}

std::vector<uint8_t> BuildIpPacket(const PacketRecord& r, bool include_payload) {
  std::vector<uint8_t> l4;
  if (r.transport == Transport::kTcp) {
    const auto opts = EncodeTcpOptions(r.tcp_options);
    l4.assign(20 + opts.size(), 0);
    PutBe16(&l4[0], r.src.port);
    PutBe16(&l4[2], r.dst.port);
    PutBe32(&l4[4], r.tcp_seq);
    PutBe32(&l4[8], r.tcp_ack);
    l4[12] = static_cast<uint8_t>(((20 + opts.size()) / 4) << 4);
    l4[13] = r.tcp_flags;
    PutBe16(&l4[14], r.tcp_window);
    std::copy(opts.begin(), opts.end(), l4.begin() + 20);
  } else {
    l4.assign(8, 0);
    PutBe16(&l4[0], r.src.port);
    PutBe16(&l4[2], r.dst.port);
    PutBe16(&l4[4], static_cast<uint16_t>(8 + r.payload_len));
  }
  const uint32_t l4_wire = static_cast<uint32_t>(l4.size()) + r.payload_len;

  std::vector<uint8_t> pkt;
  if (r.src.address.is_v4()) {
    pkt.assign(20, 0);
    pkt[0] = 0x45;
    pkt[1] = static_cast<uint8_t>(r.ecn);
    PutBe16(&pkt[2], static_cast<uint16_t>(20 + l4_wire));
    pkt[6] = 0x40;  // DF
    pkt[8] = 64;
    pkt[9] = static_cast<uint8_t>(r.transport);
    std::copy_n(r.src.address.bytes().begin(), 4, pkt.begin() + 12);
    std::copy_n(r.dst.address.bytes().begin(), 4, pkt.begin() + 16);
    uint32_t sum = 0;
    for (int i = 0; i < 20; i += 2) sum += (pkt[i] << 8) | pkt[i + 1];
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    PutBe16(&pkt[10], static_cast<uint16_t>(~sum));
  } else {
    pkt.assign(40, 0);
    const uint8_t tc = static_cast<uint8_t>(r.ecn);
    pkt[0] = static_cast<uint8_t>(0x60 | (tc >> 4));
    pkt[1] = static_cast<uint8_t>(tc << 4);
    PutBe16(&pkt[4], static_cast<uint16_t>(l4_wire));
    pkt[6] = static_cast<uint8_t>(r.transport);
    pkt[7] = 64;
    std::copy_n(r.src.address.bytes().begin(), 16, pkt.begin() + 8);
    std::copy_n(r.dst.address.bytes().begin(), 16, pkt.begin() + 24);
  }
  pkt.insert(pkt.end(), l4.begin(), l4.end());
  if (include_payload) pkt.resize(pkt.size() + r.payload_len, 0);
  return pkt;
}

std::string FlagsToString(uint8_t flags) {
  static constexpr std::pair<uint8_t, const char*> kNames[] = {
      {tcp_flags::kSyn, "SYN"}, {tcp_flags::kAck, "ACK"}, {tcp_flags::kFin, "FIN"},
      {tcp_flags::kRst, "RST"}, {tcp_flags::kPsh, "PSH"}, {tcp_flags::kUrg, "URG"},
      {tcp_flags::kEce, "ECE"}, {tcp_flags::kCwr, "CWR"}};
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (flags & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out;
}

}  // namespace optperf::capture

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

#include "optperf/orchestrator/packet_capture.h"

#include <arpa/inet.h>
#include <linux/if_ether.h>
#include <linux/if_packet.h>
#include <net/if.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "optperf/capture/pcap.h"

namespace optperf::orchestrator {
namespace {

bool Matches(const capture::PacketRecord& p, const CaptureFilter& f) {
  if (f.host && p.src.address != *f.host && p.dst.address != *f.host) return false;
  if (f.ports.empty()) return true;
  return std::find(f.ports.begin(), f.ports.end(), p.src.port) != f.ports.end() ||
         std::find(f.ports.begin(), f.ports.end(), p.dst.port) != f.ports.end();
}

}  // namespace

struct PacketCapture::Impl {
  int fd = -1;
  int lo_index = 0;
  CaptureFilter filter;
  uint32_t snaplen;
  capture::PcapWriter writer;
  std::atomic<bool> stop{false};
  std::thread thread;
  CaptureStats stats;
  bool stopped = false;

  Impl(const std::filesystem::path& out, CaptureFilter f, uint32_t snap)
      : filter(std::move(f)), snaplen(snap), writer(out, capture::LinkType::kRaw, snap, true) {}

  // Returns false when the socket had nothing more.
  bool ReadOne(std::vector<uint8_t>& buf) {
    sockaddr_ll from{};
    iovec iov{buf.data(), buf.size()};
    alignas(cmsghdr) char control[CMSG_SPACE(sizeof(timespec))];
    msghdr msg{};
    msg.msg_name = &from;
    msg.msg_namelen = sizeof from;
    msg.msg_iov = &iov;
    msg.msg_iovlen = 1;
    msg.msg_control = control;
    msg.msg_controllen = sizeof control;
    const ssize_t n = ::recvmsg(fd, &msg, MSG_TRUNC | MSG_DONTWAIT);
    if (n < 0) return false;
    ++stats.seen;
    // Loopback frames show up once per direction.
    if (from.sll_ifindex == lo_index && from.sll_pkttype == PACKET_OUTGOING) return true;
    const uint16_t proto = ntohs(from.sll_protocol);
    if (proto != ETH_P_IP && proto != ETH_P_IPV6) return true;
    timespec ts{};
    for (cmsghdr* c = CMSG_FIRSTHDR(&msg); c; c = CMSG_NXTHDR(&msg, c)) {
      if (c->cmsg_level == SOL_SOCKET && c->cmsg_type == SO_TIMESTAMPNS) {
        std::memcpy(&ts, CMSG_DATA(c), sizeof ts);
      }
    }
    if (ts.tv_sec == 0) clock_gettime(CLOCK_REALTIME, &ts);
    const size_t caplen = std::min<size_t>(static_cast<size_t>(n), buf.size());
    capture::ParseStats ps;
    const auto rec = capture::DecodeIpPacket({buf.data(), caplen}, static_cast<uint32_t>(n), ps);
    if (!rec || !Matches(*rec, filter)) return true;
    writer.Write(int64_t{ts.tv_sec} * 1'000'000'000 + ts.tv_nsec, {buf.data(), caplen},
                 static_cast<uint32_t>(n));
    ++stats.written;
    return true;
  }

  void Loop() {
    std::vector<uint8_t> buf(snaplen);
    while (!stop) {
      pollfd p{fd, POLLIN, 0};
      if (::poll(&p, 1, 50) <= 0) continue;
      while (ReadOne(buf)) {
      }
    }
    while (ReadOne(buf)) {
    }
  }
};

PacketCapture::PacketCapture(const std::filesystem::path& output, CaptureFilter filter,
                             const std::string& interface, uint32_t snaplen)
    : impl_(std::make_unique<Impl>(output, std::move(filter), snaplen)) {
  const int fd = ::socket(AF_PACKET, SOCK_DGRAM | SOCK_CLOEXEC, htons(ETH_P_ALL));
  if (fd < 0) {
    throw CaptureUnavailable(std::string("AF_PACKET socket: ") + std::strerror(errno) +
                             " (packet capture needs CAP_NET_RAW)");
  }
  impl_->fd = fd;
  impl_->lo_index = static_cast<int>(::if_nametoindex("lo"));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_TIMESTAMPNS, &one, sizeof one);
  int rcvbuf = 64 << 20;
  if (::setsockopt(fd, SOL_SOCKET, SO_RCVBUFFORCE, &rcvbuf, sizeof rcvbuf) != 0) {
    ::setsockopt(fd, SOL_SOCKET, SO_RCVBUF, &rcvbuf, sizeof rcvbuf);
  }
  if (!interface.empty()) {
    sockaddr_ll sll{};
    sll.sll_family = AF_PACKET;
    sll.sll_protocol = htons(ETH_P_ALL);
    sll.sll_ifindex = static_cast<int>(::if_nametoindex(interface.c_str()));
    if (sll.sll_ifindex == 0 || ::bind(fd, reinterpret_cast<sockaddr*>(&sll), sizeof sll) != 0) {
      ::close(fd);
      impl_->fd = -1;
      throw CaptureUnavailable("cannot capture on interface " + interface);
    }
  }
  // Reset drop counters.
  tpacket_stats st{};
  socklen_t len = sizeof st;
  ::getsockopt(fd, SOL_PACKET, PACKET_STATISTICS, &st, &len);
  impl_->thread = std::thread([this] { impl_->Loop(); });
}

PacketCapture::~PacketCapture() {
  Stop();
  if (impl_->fd >= 0) ::close(impl_->fd);
}

CaptureStats PacketCapture::Stop() {
  if (!impl_->stopped) {
    impl_->stopped = true;
    impl_->stop = true;
    if (impl_->thread.joinable()) impl_->thread.join();
    tpacket_stats st{};
    socklen_t len = sizeof st;
    if (::getsockopt(impl_->fd, SOL_PACKET, PACKET_STATISTICS, &st, &len) == 0) {
      impl_->stats.kernel_drops = st.tp_drops;
    }
    impl_->writer.Flush();
  }
  return impl_->stats;
}

}  // namespace optperf::orchestrator

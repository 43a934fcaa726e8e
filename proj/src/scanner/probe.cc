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
#include <linux/filter.h>
#include <linux/if_packet.h>
#include <net/ethernet.h>
#include <net/if.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "optperf/capture/pcap.h"
#include "optperf/common/token_bucket.h"
#include "optperf/scanner/scanner.h"

namespace optperf::scanner {
namespace {

namespace tf = capture::tcp_flags;
using Clock = std::chrono::steady_clock;

// Ports above the default Linux ephemeral range, so probes never collide
// with the host's own connections.
constexpr uint16_t kFirstPort = 61000;
constexpr uint16_t kPortCount = 65535 - kFirstPort + 1;

void Put16(std::vector<uint8_t>& b, size_t off, uint16_t v) {
  b[off] = v >> 8;
  b[off + 1] = v & 0xff;
}

void Put32(std::vector<uint8_t>& b, size_t off, uint32_t v) {
  for (int i = 0; i < 4; ++i) b[off + i] = (v >> (24 - 8 * i)) & 0xff;
}

std::string Errno(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    std::swap(fd_, o.fd_);
    return *this;
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

void FillSockaddr(const IpAddress& a, uint16_t port, sockaddr_storage& ss, socklen_t& len) {
  std::memset(&ss, 0, sizeof ss);
  if (a.is_v4()) {
    auto* s = reinterpret_cast<sockaddr_in*>(&ss);
    s->sin_family = AF_INET;
    s->sin_port = htons(port);
    std::memcpy(&s->sin_addr, a.bytes().data(), 4);
    len = sizeof *s;
  } else {
    auto* s = reinterpret_cast<sockaddr_in6*>(&ss);
    s->sin6_family = AF_INET6;
    s->sin6_port = htons(port);
    std::memcpy(&s->sin6_addr, a.bytes().data(), 16);
    len = sizeof *s;
  }
}

// The local address the kernel would pick towards `dst`.
IpAddress SourceFor(const IpAddress& dst) {
  Fd fd(::socket(dst.is_v4() ? AF_INET : AF_INET6, SOCK_DGRAM | SOCK_CLOEXEC, 0));
  if (fd.get() < 0) throw ScanError(Errno("socket"));
  sockaddr_storage ss;
  socklen_t len;
  FillSockaddr(dst, 9, ss, len);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&ss), len) != 0) {
    throw ScanError(Errno(("no route to " + dst.ToString()).c_str()));
  }
  len = sizeof ss;
  ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&ss), &len);
  if (dst.is_v4()) {
    const auto* s = reinterpret_cast<sockaddr_in*>(&ss);
    return IpAddress::FromBytes(IpFamily::kV4, {reinterpret_cast<const uint8_t*>(&s->sin_addr), 4});
  }
  const auto* s = reinterpret_cast<sockaddr_in6*>(&ss);
  return IpAddress::FromBytes(IpFamily::kV6, {reinterpret_cast<const uint8_t*>(&s->sin6_addr), 16});
}

// Raw sockets also receive every inbound TCP segment; answers are read from
// the packet socket instead, so drop everything here.
void DropAllInput(int fd) {
  sock_filter code[] = {{BPF_RET | BPF_K, 0, 0, 0}};
  sock_fprog prog{1, code};
  ::setsockopt(fd, SOL_SOCKET, SO_ATTACH_FILTER, &prog, sizeof prog);
}

struct Probe {
  size_t index = 0;
  IpAddress src;
  IpAddress dst;
  uint16_t sport = 0;
  uint32_t isn = 0;
  int attempt = 0;
  Clock::time_point deadline;
};

class Engine {
 public:
  explicit Engine(const ScanOptions& opts) : opts_(opts), rng_(std::random_device{}()) {
    recv_ = Fd(::socket(AF_PACKET, SOCK_DGRAM | SOCK_CLOEXEC | SOCK_NONBLOCK, htons(ETH_P_ALL)));
    if (recv_.get() < 0) throw ScanError(Errno("packet socket (CAP_NET_RAW required)"));
    if (!opts.interface.empty()) {
      sockaddr_ll ll{};
      ll.sll_family = AF_PACKET;
      ll.sll_protocol = htons(ETH_P_ALL);
      ll.sll_ifindex = static_cast<int>(if_nametoindex(opts.interface.c_str()));
      if (ll.sll_ifindex == 0) throw ScanError("unknown interface " + opts.interface);
      if (::bind(recv_.get(), reinterpret_cast<sockaddr*>(&ll), sizeof ll) != 0) {
        throw ScanError(Errno("bind packet socket"));
      }
    }
    int buf = 8 << 20;
    ::setsockopt(recv_.get(), SOL_SOCKET, SO_RCVBUFFORCE, &buf, sizeof buf);
  }

  void Send(const Probe& p, const std::vector<uint8_t>& segment) {
    Fd& fd = p.dst.is_v4() ? send4_ : send6_;
    if (fd.get() < 0) {
      fd = Fd(::socket(p.dst.is_v4() ? AF_INET : AF_INET6, SOCK_RAW | SOCK_CLOEXEC, IPPROTO_TCP));
      if (fd.get() < 0) throw ScanError(Errno("raw socket (CAP_NET_RAW required)"));
      DropAllInput(fd.get());
    }
    sockaddr_storage ss;
    socklen_t len;
    // Raw sockets take the port from the TCP header; the address field only
    // routes.
    FillSockaddr(p.dst, 0, ss, len);
    if (::sendto(fd.get(), segment.data(), segment.size(), 0, reinterpret_cast<sockaddr*>(&ss),
                 len) < 0) {
      spdlog::warn("scanner: send to {} failed: {}", p.dst.ToString(), std::strerror(errno));
    }
  }

  void Run(std::vector<OptionSupport>& results) {
    TokenBucket bucket(opts_.probes_per_second, std::max(1.0, opts_.probes_per_second / 10));
    std::deque<Probe> queue;
    for (size_t i = 0; i < results.size(); ++i) {
      if (results[i].status == ProbeStatus::kResolveFailed) continue;
      Probe p;
      p.index = i;
      p.dst = *results[i].resolved_ip;
      try {
        p.src = SourceFor(p.dst);
      } catch (const ScanError& e) {
        results[i].status = ProbeStatus::kNoAnswer;
        results[i].detail = e.what();
        continue;
      }
      queue.push_back(p);
    }
    std::vector<uint8_t> buf(65536);
    while (!queue.empty() || !in_flight_.empty()) {
      while (!queue.empty() && in_flight_.size() < opts_.max_in_flight && bucket.TryAcquire()) {
        Start(queue.front());
        queue.pop_front();
      }
      auto now = Clock::now();
      auto wait = std::chrono::milliseconds(queue.empty() ? 50 : 5);
      for (const auto& [key, p] : in_flight_) {
        wait = std::min(wait, std::chrono::ceil<std::chrono::milliseconds>(
                                  std::max(p.deadline - now, Clock::duration::zero())));
      }
      pollfd pfd{recv_.get(), POLLIN, 0};
      ::poll(&pfd, 1, static_cast<int>(wait.count()));
      for (;;) {
        sockaddr_ll from{};
        socklen_t flen = sizeof from;
        const ssize_t n = ::recvfrom(recv_.get(), buf.data(), buf.size(), 0,
                                     reinterpret_cast<sockaddr*>(&from), &flen);
        if (n <= 0) break;
        if (from.sll_pkttype == PACKET_OUTGOING) continue;
        capture::ParseStats stats;
        const auto rec = capture::DecodeIpPacket({buf.data(), static_cast<size_t>(n)},
                                                 static_cast<uint32_t>(n), stats);
        if (rec && rec->is_tcp()) Handle(*rec, results);
      }
      now = Clock::now();
      for (auto it = in_flight_.begin(); it != in_flight_.end();) {
        if (it->second.deadline > now) {
          ++it;
          continue;
        }
        Probe p = it->second;
        ports_.erase(p.sport);
        it = in_flight_.erase(it);
        if (p.attempt < opts_.retries) {
          ++p.attempt;
          queue.push_front(p);
        } else {
          results[p.index].status = ProbeStatus::kNoAnswer;
          results[p.index].detail = "no answer after " + std::to_string(p.attempt + 1) + " SYNs";
        }
      }
    }
  }

 private:
  using Key = std::tuple<IpAddress, uint16_t>;  // remote address, local port

  void Start(Probe p) {
    std::uniform_int_distribution<uint32_t> any;
    do {
      p.sport = static_cast<uint16_t>(kFirstPort + any(rng_) % kPortCount);
    } while (ports_.count(p.sport));
    p.isn = any(rng_);
    p.deadline = Clock::now() + opts_.timeout;
    ports_.insert(p.sport);
    in_flight_[{p.dst, p.sport}] = p;
    Send(p, BuildSyn(p.src, p.dst, p.sport, opts_.port, p.isn));
  }

  void Handle(const capture::PacketRecord& r, std::vector<OptionSupport>& results) {
    if (r.src.port != opts_.port) return;
    auto it = in_flight_.find({r.src.address, r.dst.port});
    if (it == in_flight_.end()) return;
    const Probe p = it->second;
    if (!r.has_flag(tf::kAck) || r.tcp_ack != p.isn + 1) return;
    OptionSupport& out = results[p.index];
    if (r.has_flag(tf::kRst)) {
      out.status = ProbeStatus::kRefused;
    } else if (r.has_flag(tf::kSyn)) {
      SynAckView v;
      v.ws = r.tcp_options.window_scale.has_value();
      v.ws_shift = r.tcp_options.window_scale.value_or(0);
      v.sack = r.tcp_options.sack_permitted;
      v.ece = r.has_flag(tf::kEce);
      v.cwr = r.has_flag(tf::kCwr);
      ApplySynAck(v, out);
      if (opts_.termination == Termination::kRst) {
        Send(p, BuildSegment(p.src, p.dst, p.sport, opts_.port, p.isn + 1, 0, tf::kRst));
      } else {
        Send(p, BuildSegment(p.src, p.dst, p.sport, opts_.port, p.isn + 1, r.tcp_seq + 1,
                             tf::kFin | tf::kAck));
      }
    } else {
      return;
    }
    ports_.erase(p.sport);
    in_flight_.erase(it);
  }

  const ScanOptions& opts_;
  std::mt19937 rng_;
  Fd recv_, send4_, send6_;
  std::map<Key, Probe> in_flight_;
  std::set<uint16_t> ports_;
};

}  // namespace

uint16_t TcpChecksum(const IpAddress& src, const IpAddress& dst, std::span<const uint8_t> segment) {
  uint64_t sum = 0;
  auto add = [&](std::span<const uint8_t> b) {
    for (size_t i = 0; i + 1 < b.size(); i += 2) sum += (b[i] << 8) | b[i + 1];
    if (b.size() % 2) sum += b.back() << 8;
  };
  add(src.bytes());
  add(dst.bytes());
  sum += 6;  // protocol
  sum += segment.size();
  add(segment);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<uint16_t>(~sum);
}

std::vector<uint8_t> BuildSegment(const IpAddress& src, const IpAddress& dst, uint16_t sport,
                                  uint16_t dport, uint32_t seq, uint32_t ack, uint8_t flags) {
  std::vector<uint8_t> s(20, 0);
  Put16(s, 0, sport);
  Put16(s, 2, dport);
  Put32(s, 4, seq);
  Put32(s, 8, ack);
  s[12] = 5 << 4;
  s[13] = flags;
  Put16(s, 14, flags & tf::kRst ? 0 : 65535);
  Put16(s, 16, TcpChecksum(src, dst, s));
  return s;
}

std::vector<uint8_t> BuildSyn(const IpAddress& src, const IpAddress& dst, uint16_t sport,
                              uint16_t dport, uint32_t seq) {
  std::vector<uint8_t> s(32, 0);
  Put16(s, 0, sport);
  Put16(s, 2, dport);
  Put32(s, 4, seq);
  s[12] = 8 << 4;
  s[13] = tf::kSyn | tf::kEce | tf::kCwr;
  Put16(s, 14, 65535);
  const uint8_t options[12] = {2, 4, 1460 >> 8, 1460 & 0xff, 1, 3, 3, 14, 1, 1, 4, 2};
  std::memcpy(s.data() + 20, options, sizeof options);
  Put16(s, 16, TcpChecksum(src, dst, s));
  return s;
}

void ApplySynAck(const SynAckView& v, OptionSupport& out) {
  out.status = ProbeStatus::kOk;
  out.ws = v.ws;
  out.ws_shift = v.ws ? v.ws_shift : 0;
  out.sack = v.sack;
  out.ecn = v.ece && !v.cwr;
}

std::vector<OptionSupport> ProbeDomains(const std::vector<std::string>& domains,
                                        net::Resolver& resolver, const ScanOptions& opts) {
  std::vector<OptionSupport> results(domains.size());
  std::atomic<size_t> next{0};
  auto resolve = [&] {
    for (size_t i; (i = next++) < domains.size();) {
      results[i].domain = domains[i];
      try {
        const auto addrs = resolver.Resolve(domains[i]);
        if (addrs.empty()) throw net::ResolveError("no addresses");
        results[i].resolved_ip = net::PreferV4(addrs);
      } catch (const net::ResolveError& e) {
        results[i].status = ProbeStatus::kResolveFailed;
        results[i].detail = e.what();
      }
    }
  };
  std::vector<std::thread> workers;
  const size_t n = std::min<size_t>({domains.size(), opts.max_in_flight, 16});
  for (size_t i = 1; i < n; ++i) workers.emplace_back(resolve);
  resolve();
  for (auto& t : workers) t.join();
  Engine(opts).Run(results);
  return results;
}

OptionSupport ProbeDomain(const std::string& domain, net::Resolver& resolver,
                          const ScanOptions& opts) {
  return ProbeDomains({domain}, resolver, opts).front();
}

}  // namespace optperf::scanner

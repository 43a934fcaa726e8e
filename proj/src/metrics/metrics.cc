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

#include "optperf/metrics/metrics.h"

#include <deque>
#include <map>
#include <numeric>
#include <unordered_map>

namespace optperf::metrics {

using capture::PacketRecord;
using capture::Transport;
namespace tf = capture::tcp_flags;

double RoundedRatio(uint64_t num, uint64_t den) {
  constexpr uint64_t kExact = uint64_t{1} << 53;
  if (num < kExact && den < kExact) {
    // Both operands are exact doubles, so IEEE division rounds the true
    // quotient exactly once.
    return static_cast<double>(num) / static_cast<double>(den);
  }
  return static_cast<double>(static_cast<long double>(num) /
                             static_cast<long double>(den));
}

namespace {

double BitsPerSecond(uint64_t bytes, int64_t duration_us) {
  const unsigned __int128 scaled = static_cast<unsigned __int128>(bytes) * 8u * 1'000'000u;
  if (scaled >> 64) {
    return static_cast<double>(static_cast<long double>(bytes) * 8.0L /
                               (static_cast<long double>(duration_us) / 1e6L));
  }
  return RoundedRatio(static_cast<uint64_t>(scaled), static_cast<uint64_t>(duration_us));
}

int64_t CheckedSpan(const Flow& flow) {
  if (flow.packets.size() < 2) {
    throw UndefinedThroughput("undefined-throughput: flow has fewer than two packets");
  }
  const int64_t span = flow.duration_us();
  if (span <= 0) throw UndefinedThroughput("undefined-throughput: zero duration");
  return span;
}

// Maps 32-bit wire values onto a 64-bit line using serial-number arithmetic
// around the highest value seen so far.
class Unwrapper {
 public:
  int64_t Unwrap(uint32_t v) {
    if (!init_) {
      init_ = true;
      ref_ = v;
      return ref_;
    }
    const int64_t out = Peek(v);
    if (out > ref_) ref_ = out;
    return out;
  }
  int64_t Peek(uint32_t v) const {
    if (!init_) return v;
    return ref_ + static_cast<int32_t>(v - static_cast<uint32_t>(ref_));
  }
  bool initialized() const { return init_; }

 private:
  bool init_ = false;
  int64_t ref_ = 0;
};

// Disjoint half-open byte ranges.
class IntervalSet {
 public:
  bool Overlaps(int64_t l, int64_t r) const {
    auto it = ranges_.lower_bound(r);
    if (it == ranges_.begin()) return false;
    --it;
    return it->second > l;
  }
  void Add(int64_t l, int64_t r) {
    if (l >= r) return;
    auto it = ranges_.upper_bound(l);
    if (it != ranges_.begin()) {
      auto prev = std::prev(it);
      if (prev->second >= l) {
        l = prev->first;
        r = std::max(r, prev->second);
        it = ranges_.erase(prev);
      }
    }
    while (it != ranges_.end() && it->first <= r) {
      r = std::max(r, it->second);
      it = ranges_.erase(it);
    }
    ranges_.emplace(l, r);
  }

 private:
  std::map<int64_t, int64_t> ranges_;
};

// State of one direction's sequence space: the data it sends and the
// acknowledgements the peer returns for it.
struct SequenceSpace {
  Unwrapper seq;
  IntervalSet carried;
  std::optional<int64_t> next_expected;
  std::optional<int64_t> highest_ack;
  std::optional<int64_t> last_ack;
  std::optional<uint16_t> last_ack_window;
  int dup_acks = 0;
  int64_t last_dup_ack_us = 0;
};

}  // namespace

double MeanThroughput(const Flow& flow) {
  const int64_t span = CheckedSpan(flow);
  uint64_t bytes = 0;
  for (const auto& p : flow.packets) bytes += p.ip_total_length;
  return BitsPerSecond(bytes, span);
}

double ResponderThroughput(const Flow& flow) {
  const int64_t span = CheckedSpan(flow);
  uint64_t bytes = 0;
  for (const auto& p : flow.packets) {
    if (flow.DirectionOf(p) == Direction::kFromResponder) bytes += p.ip_total_length;
  }
  return BitsPerSecond(bytes, span);
}

double QuicThroughput(const Flow& flow) {
  if (flow.key.transport != Transport::kUdp) {
    throw std::invalid_argument("QUIC throughput requires a UDP flow");
  }
  return MeanThroughput(flow);
}

std::vector<RttSample> RttSamples(const Flow& flow) {
  bool ts_from[2] = {false, false};
  for (const auto& p : flow.packets) {
    if (p.tcp_options.timestamp) ts_from[static_cast<int>(flow.DirectionOf(p))] = true;
  }
  if (!flow.is_tcp() || !ts_from[0] || !ts_from[1]) return {};

  struct Side {
    Unwrapper tsval;
    std::unordered_map<int64_t, std::deque<int64_t>> pending;
  };
  Side side[2];
  std::vector<RttSample> out;
  for (const auto& p : flow.packets) {
    if (!p.tcp_options.timestamp) continue;
    const int me = static_cast<int>(flow.DirectionOf(p));
    const int peer = 1 - me;
    if (p.has_flag(tf::kAck) && side[peer].tsval.initialized()) {
      const int64_t echoed = side[peer].tsval.Peek(p.tcp_options.timestamp->tsecr);
      auto it = side[peer].pending.find(echoed);
      if (it != side[peer].pending.end() && !it->second.empty() &&
          it->second.front() < p.timestamp_us) {
        const int64_t sent = it->second.front();
        it->second.pop_front();
        if (it->second.empty()) side[peer].pending.erase(it);
        out.push_back({(p.timestamp_us - sent) / 1000.0, static_cast<Direction>(peer),
                       p.timestamp_us});
      }
    }
    const int64_t v = side[me].tsval.Unwrap(p.tcp_options.timestamp->tsval);
    side[me].pending[v].push_back(p.timestamp_us);
  }
  return out;
}

std::optional<double> MeanRttMs(std::span<const RttSample> samples) {
  if (samples.empty()) return std::nullopt;
  double sum = 0;
  for (const auto& s : samples) sum += s.ms;
  return sum / static_cast<double>(samples.size());
}

std::optional<double> MeanRttMs(std::span<const RttSample> samples, Direction only) {
  double sum = 0;
  size_t n = 0;
  for (const auto& s : samples) {
    if (s.direction != only) continue;
    sum += s.ms;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

const char* ToString(RetransmissionClass c) {
  switch (c) {
    case RetransmissionClass::kNone: return "none";
    case RetransmissionClass::kRetransmission: return "retransmission";
    case RetransmissionClass::kFastRetransmission: return "fast-retransmission";
    case RetransmissionClass::kSpurious: return "spurious";
  }
  return "?";
}

size_t Classification::count(RetransmissionClass c) const {
  return static_cast<size_t>(std::count(classes.begin(), classes.end(), c));
}

Classification ClassifyRetransmissions(const Flow& flow) {
  Classification result;
  result.classes.assign(flow.packets.size(), RetransmissionClass::kNone);
  result.best_effort = !flow.handshake_observed;
  if (!flow.is_tcp()) return result;

  SequenceSpace space[2];
  for (size_t i = 0; i < flow.packets.size(); ++i) {
    const PacketRecord& p = flow.packets[i];
    const int me = static_cast<int>(flow.DirectionOf(p));
    SequenceSpace& own = space[me];
    SequenceSpace& peer = space[1 - me];
    const bool control = p.has_flag(tf::kSyn) || p.has_flag(tf::kFin) || p.has_flag(tf::kRst);

    // The acknowledgement field speaks about the peer's sequence space.
    if (p.has_flag(tf::kAck)) {
      const int64_t ack = peer.seq.Unwrap(p.tcp_ack);
      if (!peer.highest_ack || ack > *peer.highest_ack) peer.highest_ack = ack;
      const bool duplicate = p.payload_len == 0 && !control && peer.last_ack &&
                             ack == *peer.last_ack && peer.last_ack_window &&
                             p.tcp_window == *peer.last_ack_window && p.tcp_window != 0;
      if (duplicate) {
        ++peer.dup_acks;
        peer.last_dup_ack_us = p.timestamp_us;
      } else if (!peer.last_ack || ack != *peer.last_ack) {
        peer.dup_acks = 0;
      }
      peer.last_ack = ack;
      peer.last_ack_window = p.tcp_window;
    }

    const int64_t seq = own.seq.Unwrap(p.tcp_seq);
    const int64_t start = p.has_flag(tf::kSyn) ? seq + 1 : seq;
    const int64_t end = start + p.payload_len;
    const int64_t seq_end = end + (p.has_flag(tf::kFin) ? 1 : 0);

    if (p.payload_len > 0) {
      const bool keepalive = p.payload_len <= 1 && !control && own.next_expected &&
                             start == *own.next_expected - 1;
      RetransmissionClass c = RetransmissionClass::kNone;
      if (keepalive) {
        ++result.keepalives;
      } else if (own.highest_ack && end <= *own.highest_ack) {
        c = RetransmissionClass::kSpurious;
      } else if (own.dup_acks >= kFastRetransmissionMinDupAcks && own.last_ack &&
                 start == *own.last_ack &&
                 p.timestamp_us - own.last_dup_ack_us <= kFastRetransmissionWindowUs) {
        c = RetransmissionClass::kFastRetransmission;
      } else if (own.carried.Overlaps(start, end)) {
        c = RetransmissionClass::kRetransmission;
      }
      result.classes[i] = c;
      if (!keepalive) own.carried.Add(start, end);
    }
    if (!own.next_expected || seq_end > *own.next_expected) own.next_expected = seq_end;
  }
  return result;
}

double RetransmissionRate(const Flow& flow, const Classification& cls) {
  uint64_t data = 0;
  uint64_t retx = 0;
  for (size_t i = 0; i < flow.packets.size(); ++i) {
    const auto& p = flow.packets[i];
    if (p.payload_len == 0) continue;
    data += p.payload_len;
    if (cls.classes[i] != RetransmissionClass::kNone) retx += p.payload_len;
  }
  if (data == 0) return 0.0;
  return RoundedRatio(retx, data);
}

double Goodput(const Flow& flow, const Classification& cls) {
  const int64_t span = CheckedSpan(flow);
  uint64_t bytes = 0;
  for (size_t i = 0; i < flow.packets.size(); ++i) {
    if (cls.classes[i] == RetransmissionClass::kNone) bytes += flow.packets[i].ip_total_length;
  }
  return BitsPerSecond(bytes, span);
}

OptionUsage CountOptionUsage(const Flow& flow) {
  OptionUsage u;
  for (const auto& p : flow.packets) {
    switch (p.ecn) {
      case capture::EcnCodepoint::kEct0: ++u.ecn.ect0; break;
      case capture::EcnCodepoint::kEct1: ++u.ecn.ect1; break;
      case capture::EcnCodepoint::kCe: ++u.ecn.ce; break;
      case capture::EcnCodepoint::kNotEct: break;
    }
    if (!p.is_tcp()) continue;
    if (!p.has_flag(tf::kSyn)) {
      if (p.has_flag(tf::kEce)) ++u.ecn.ece_flags;
      if (p.has_flag(tf::kCwr)) ++u.ecn.cwr_flags;
    }
    if (!p.tcp_options.sack_blocks.empty()) {
      ++u.sack.packets_with_sack_blocks;
      u.sack.total_sack_blocks += p.tcp_options.sack_blocks.size();
    }
  }
  return u;
}

PerfIndicators ComputeIndicators(const Flow& flow) {
  PerfIndicators out;
  out.quic = flow.key.transport == Transport::kUdp;
  for (const auto& p : flow.packets) out.bytes_total += p.ip_total_length;
  out.mean_throughput_bps = MeanThroughput(flow);
  out.duration_s = flow.duration_us() / 1e6;
  out.responder_throughput_bps = ResponderThroughput(flow);
  if (out.quic) {
    out.goodput_bps = out.mean_throughput_bps;
    return out;
  }
  const Classification cls = ClassifyRetransmissions(flow);
  out.best_effort = cls.best_effort;
  out.goodput_bps = Goodput(flow, cls);
  out.retransmission_rate = RetransmissionRate(flow, cls);
  for (size_t i = 0; i < flow.packets.size(); ++i) {
    if (cls.classes[i] != RetransmissionClass::kNone) {
      out.bytes_retransmitted += flow.packets[i].ip_total_length;
    }
  }
  const auto samples = RttSamples(flow);
  out.rtt_sample_count = samples.size();
  out.mean_rtt_ms = MeanRttMs(samples);
  out.mean_rtt_initiator_ms = MeanRttMs(samples, Direction::kFromInitiator);
  const OptionUsage usage = CountOptionUsage(flow);
  out.ecn = usage.ecn;
  out.sack = usage.sack;
  return out;
}

}  // namespace optperf::metrics

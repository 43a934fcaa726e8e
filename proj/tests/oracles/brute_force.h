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

#ifndef OPTPERF_TESTS_ORACLES_BRUTE_FORCE_H_
#define OPTPERF_TESTS_ORACLES_BRUTE_FORCE_H_

// Quadratic re-statements of the metric rules, written straight from their
// definitions and sharing no code with the library. Sequence numbers are
// taken relative to the first packet each side sent, which is valid for
// flows spanning less than 2^31 bytes.

#include <cstdint>
#include <optional>
#include <vector>

#include "optperf/capture/flow.h"

namespace optperf::oracle {

using capture::Flow;
using capture::PacketRecord;
namespace tf = capture::tcp_flags;

enum Label { kNone = 0, kRetx = 1, kFast = 2, kSpurious = 3 };

inline bool FromInitiator(const Flow& f, const PacketRecord& p) { return p.src == f.initiator; }

inline std::optional<uint32_t> Base(const Flow& f, bool initiator_side) {
  for (const auto& p : f.packets) {
    if (FromInitiator(f, p) == initiator_side) return p.tcp_seq;
  }
  return std::nullopt;
}

inline std::vector<int> Labels(const Flow& f) {
  const auto& ps = f.packets;
  std::vector<int> out(ps.size(), kNone);
  const std::optional<uint32_t> base[2] = {Base(f, true), Base(f, false)};
  auto rel = [&](bool initiator_side, uint32_t v) -> int64_t {
    return static_cast<int64_t>(static_cast<uint32_t>(v - *base[initiator_side ? 0 : 1]));
  };
  auto start_of = [&](const PacketRecord& p) {
    return rel(FromInitiator(f, p), p.tcp_seq) + (p.has_flag(tf::kSyn) ? 1 : 0);
  };
  auto control = [](const PacketRecord& p) {
    return p.has_flag(tf::kSyn) || p.has_flag(tf::kFin) || p.has_flag(tf::kRst);
  };
  std::vector<bool> keepalive(ps.size(), false);

  for (size_t i = 0; i < ps.size(); ++i) {
    const PacketRecord& p = ps[i];
    if (p.payload_len == 0) continue;
    const bool side = FromInitiator(f, p);
    const int64_t start = start_of(p);
    const int64_t end = start + p.payload_len;

    // Highest sequence number (plus SYN/FIN) sent so far in this direction.
    std::optional<int64_t> next_expected;
    for (size_t j = 0; j < i; ++j) {
      if (FromInitiator(f, ps[j]) != side) continue;
      const int64_t e = start_of(ps[j]) + ps[j].payload_len + (ps[j].has_flag(tf::kFin) ? 1 : 0);
      if (!next_expected || e > *next_expected) next_expected = e;
    }
    if (p.payload_len <= 1 && !control(p) && next_expected && start == *next_expected - 1) {
      keepalive[i] = true;
      continue;
    }

    // ACK-bearing packets from the receiver, up to and including this one's
    // predecessors.
    std::vector<size_t> acks;
    for (size_t j = 0; j < i; ++j) {
      if (FromInitiator(f, ps[j]) != side && ps[j].has_flag(tf::kAck)) acks.push_back(j);
    }
    std::optional<int64_t> highest;
    for (size_t j : acks) {
      const int64_t a = rel(side, ps[j].tcp_ack);
      if (!highest || a > *highest) highest = a;
    }
    if (highest && end <= *highest) {
      out[i] = kSpurious;
      continue;
    }

    if (!acks.empty()) {
      const int64_t last = rel(side, ps[acks.back()].tcp_ack);
      int dups = 0;
      int64_t last_dup_t = 0;
      // Walk back through the run of ACKs carrying the latest value.
      for (size_t k = acks.size(); k-- > 0;) {
        const PacketRecord& a = ps[acks[k]];
        if (rel(side, a.tcp_ack) != last) break;
        if (k == 0) break;
        const PacketRecord& prev = ps[acks[k - 1]];
        const bool dup = a.payload_len == 0 && !control(a) &&
                         rel(side, prev.tcp_ack) == last && a.tcp_window == prev.tcp_window &&
                         a.tcp_window != 0;
        if (dup) {
          if (dups == 0) last_dup_t = a.timestamp_us;
          ++dups;
        }
      }
      if (dups >= 2 && start == last && p.timestamp_us - last_dup_t <= 20'000) {
        out[i] = kFast;
        continue;
      }
    }

    for (size_t j = 0; j < i; ++j) {
      const PacketRecord& q = ps[j];
      if (FromInitiator(f, q) != side || q.payload_len == 0 || keepalive[j]) continue;
      const int64_t qs = start_of(q);
      if (qs < end && start < qs + q.payload_len) {
        out[i] = kRetx;
        break;
      }
    }
  }
  return out;
}

inline uint64_t SumLengths(const Flow& f, const std::vector<int>* labels) {
  uint64_t s = 0;
  for (size_t i = 0; i < f.packets.size(); ++i) {
    if (labels && (*labels)[i] != kNone) continue;
    s += f.packets[i].ip_total_length;
  }
  return s;
}

struct RttPair {
  int64_t sent_us;
  int64_t echoed_us;
  bool initiator_sent;
};

// For every ACK with a timestamp, the earliest not-yet-used earlier packet
// from the peer whose TSval equals its TSecr.
inline std::vector<RttPair> RttPairs(const Flow& f) {
  bool has[2] = {false, false};
  for (const auto& p : f.packets) {
    if (p.tcp_options.timestamp) has[FromInitiator(f, p) ? 0 : 1] = true;
  }
  std::vector<RttPair> out;
  if (!has[0] || !has[1]) return out;
  std::vector<bool> used(f.packets.size(), false);
  for (size_t i = 0; i < f.packets.size(); ++i) {
    const auto& q = f.packets[i];
    if (!q.tcp_options.timestamp || !q.has_flag(tf::kAck)) continue;
    for (size_t j = 0; j < i; ++j) {
      const auto& p = f.packets[j];
      if (used[j] || !p.tcp_options.timestamp) continue;
      if (FromInitiator(f, p) == FromInitiator(f, q)) continue;
      if (p.tcp_options.timestamp->tsval != q.tcp_options.timestamp->tsecr) continue;
      if (p.timestamp_us >= q.timestamp_us) break;
      used[j] = true;
      out.push_back({p.timestamp_us, q.timestamp_us, FromInitiator(f, p)});
      break;
    }
  }
  return out;
}

}  // namespace optperf::oracle

#endif  // OPTPERF_TESTS_ORACLES_BRUTE_FORCE_H_

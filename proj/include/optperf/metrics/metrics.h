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

#ifndef OPTPERF_METRICS_METRICS_H_
#define OPTPERF_METRICS_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "optperf/capture/flow.h"

namespace optperf::metrics {

using capture::Direction;
using capture::Flow;

class UndefinedThroughput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact ratio num/den rounded once to the nearest double.
double RoundedRatio(uint64_t num, uint64_t den);

// 8 * sum(ip_total_length over every packet of the flow, both directions)
// divided by the first-to-last packet span. Throws UndefinedThroughput for a
// flow with fewer than two packets or a zero span.
double MeanThroughput(const Flow& flow);

// Same span, counting only packets sent by the responder.
double ResponderThroughput(const Flow& flow);

// MeanThroughput restricted to UDP flows (QUIC downloads).
double QuicThroughput(const Flow& flow);

struct RttSample {
  double ms = 0;
  // Direction of the packet whose TSval was echoed.
  Direction direction = Direction::kFromInitiator;
  int64_t echoed_at_us = 0;
};

// Pairs every packet carrying TSval=v with the earliest strictly later ACK
// from the peer whose TSecr=v; each packet takes part in at most one pair on
// each side. Empty unless both directions carry the timestamp option.
std::vector<RttSample> RttSamples(const Flow& flow);

std::optional<double> MeanRttMs(std::span<const RttSample> samples);
std::optional<double> MeanRttMs(std::span<const RttSample> samples, Direction only);

enum class RetransmissionClass : uint8_t {
  kNone,
  kRetransmission,
  kFastRetransmission,
  kSpurious,
};

const char* ToString(RetransmissionClass c);

struct Classification {
  // Aligned with flow.packets; packets without payload are always kNone.
  std::vector<RetransmissionClass> classes;
  size_t keepalives = 0;
  // No SYN was observed, so the sequence baseline is the first packet seen.
  bool best_effort = false;

  size_t count(RetransmissionClass c) const;
};

inline constexpr int64_t kFastRetransmissionWindowUs = 20'000;
inline constexpr int kFastRetransmissionMinDupAcks = 2;

// Per data-bearing packet, first matching rule wins:
//   Spurious            whole payload at or below the receiver's highest ACK;
//   FastRetransmission  seq equals the ACK value repeated by >= 2 duplicate
//                       ACKs, the last of them at most 20 ms earlier;
//   Retransmission      overlaps bytes an earlier packet already carried;
//   None                otherwise (including keep-alive probes).
Classification ClassifyRetransmissions(const Flow& flow);

// Retransmitted payload bytes over all payload bytes; 0 without data.
double RetransmissionRate(const Flow& flow, const Classification& cls);

// MeanThroughput over packets classified kNone.
double Goodput(const Flow& flow, const Classification& cls);

struct EcnUsage {
  uint64_t ece_flags = 0;  // SYN packets excluded: those carry negotiation
  uint64_t cwr_flags = 0;
  uint64_t ect0 = 0;
  uint64_t ect1 = 0;
  uint64_t ce = 0;
  friend bool operator==(const EcnUsage&, const EcnUsage&) = default;
};

struct SackUsage {
  uint64_t packets_with_sack_blocks = 0;
  uint64_t total_sack_blocks = 0;
  friend bool operator==(const SackUsage&, const SackUsage&) = default;
};

struct OptionUsage {
  EcnUsage ecn;
  SackUsage sack;
};

OptionUsage CountOptionUsage(const Flow& flow);

struct PerfIndicators {
  bool quic = false;
  uint64_t bytes_total = 0;
  uint64_t bytes_retransmitted = 0;  // ip_total_length of retransmitted packets
  double duration_s = 0;
  double mean_throughput_bps = 0;
  double goodput_bps = 0;
  double responder_throughput_bps = 0;
  std::optional<double> mean_rtt_ms;
  std::optional<double> mean_rtt_initiator_ms;
  size_t rtt_sample_count = 0;
  double retransmission_rate = 0;
  EcnUsage ecn;
  SackUsage sack;
  bool best_effort = false;
};

// All indicators for one download flow. TCP flows get every field; UDP
// flows only throughput, byte and duration fields. Throws
// UndefinedThroughput when the flow has no usable span.
PerfIndicators ComputeIndicators(const Flow& flow);

}  // namespace optperf::metrics

#endif  // OPTPERF_METRICS_METRICS_H_

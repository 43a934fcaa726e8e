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

#ifndef OPTPERF_SCANNER_SCANNER_H_
#define OPTPERF_SCANNER_SCANNER_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "optperf/common/ip_address.h"
#include "optperf/net/resolver.h"

namespace optperf::scanner {

enum class ProbeStatus { kOk, kNoAnswer, kRefused, kResolveFailed };
const char* ToString(ProbeStatus s);
std::optional<ProbeStatus> ParseProbeStatus(std::string_view s);

// Option fields are meaningful only when status is kOk.
struct OptionSupport {
  std::string domain;
  std::optional<IpAddress> resolved_ip;
  ProbeStatus status = ProbeStatus::kNoAnswer;
  bool ws = false;
  uint8_t ws_shift = 0;
  bool sack = false;
  bool ecn = false;
  std::string detail;
};

enum class Termination { kRst, kFin };

struct ScanOptions {
  uint16_t port = 443;
  std::chrono::milliseconds timeout{3000};
  // One retry after a timeout.
  int retries = 1;
  double probes_per_second = 100;
  size_t max_in_flight = 64;
  Termination termination = Termination::kRst;
  // Interface to listen on for answers; empty means all.
  std::string interface;
};

class ScanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The SYN-ACK fields the scanner looks at.
struct SynAckView {
  bool ws = false;
  uint8_t ws_shift = 0;
  bool sack = false;
  bool ece = false;
  bool cwr = false;
};

// ECN is agreed only when ECE is set and CWR is clear.
void ApplySynAck(const SynAckView& v, OptionSupport& out);

// Builds the scanner's SYN: MSS 1460, window scale 14 and SACK-permitted,
// with ECE|CWR. Includes a valid checksum for `src` -> `dst`.
std::vector<uint8_t> BuildSyn(const IpAddress& src, const IpAddress& dst, uint16_t sport,
                              uint16_t dport, uint32_t seq);
// Bare TCP segment without options (RST or FIN|ACK).
std::vector<uint8_t> BuildSegment(const IpAddress& src, const IpAddress& dst, uint16_t sport,
                                  uint16_t dport, uint32_t seq, uint32_t ack, uint8_t flags);
uint16_t TcpChecksum(const IpAddress& src, const IpAddress& dst, std::span<const uint8_t> segment);

// Probes every domain on `opts.port`. Results come back in input order.
// Needs CAP_NET_RAW; throws ScanError when raw sockets are unavailable.
std::vector<OptionSupport> ProbeDomains(const std::vector<std::string>& domains,
                                        net::Resolver& resolver, const ScanOptions& opts);

OptionSupport ProbeDomain(const std::string& domain, net::Resolver& resolver,
                          const ScanOptions& opts);

struct DeploymentStats {
  size_t total = 0;
  size_t ok = 0;
  size_t no_answer = 0;
  size_t refused = 0;
  size_t resolve_failed = 0;
  // Fractions of the OK probes.
  double none = 0;
  double all_three = 0;
  double ws = 0;
  double sack = 0;
  double ecn = 0;
};

// Throws std::invalid_argument on an empty list or when no probe succeeded.
DeploymentStats AggregateDeployment(const std::vector<OptionSupport>& results);

const std::vector<std::string>& ResultCsvHeader();
void WriteResultsCsv(const std::filesystem::path& path, const std::vector<OptionSupport>& rows);
std::vector<OptionSupport> ReadResultsCsv(const std::filesystem::path& path);
std::string StatsToJson(const DeploymentStats& s);

}  // namespace optperf::scanner

#endif  // OPTPERF_SCANNER_SCANNER_H_

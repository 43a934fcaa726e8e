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

#include "optperf/orchestrator/host_options.h"

#include <sstream>
#include <vector>

#include "optperf/common/sysctl.h"

namespace optperf::orchestrator {
namespace {

std::vector<std::string> Fields(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

}  // namespace

HostTcpSettings HostTcpSettings::Read() {
  return {ReadSysctl("net.ipv4.tcp_ecn"), ReadSysctl("net.ipv4.tcp_sack"),
          ReadSysctl("net.ipv4.tcp_window_scaling"), ReadSysctl("net.ipv4.tcp_rmem")};
}

void HostTcpSettings::Apply() const {
  WriteSysctl("net.ipv4.tcp_ecn", tcp_ecn);
  WriteSysctl("net.ipv4.tcp_sack", tcp_sack);
  WriteSysctl("net.ipv4.tcp_window_scaling", tcp_window_scaling);
  WriteSysctl("net.ipv4.tcp_rmem", tcp_rmem);
  const HostTcpSettings now = Read();
  if (Fields(now.tcp_rmem) != Fields(tcp_rmem) || now.tcp_ecn != tcp_ecn ||
      now.tcp_sack != tcp_sack || now.tcp_window_scaling != tcp_window_scaling) {
    throw SysctlError("host TCP settings did not take effect (read back ecn=" + now.tcp_ecn +
                      " sack=" + now.tcp_sack + " ws=" + now.tcp_window_scaling +
                      " rmem=" + now.tcp_rmem + ")");
  }
}

uint64_t ReceiveBufferForShift(int shift) { return uint64_t{1} << (15 + shift); }

HostTcpSettings SettingsFor(const OptionConfig& config, const HostTcpSettings& base) {
  if (config.is_quic()) return base;
  HostTcpSettings s = base;
  // 0 disables ECN entirely; 1 requests it on outgoing connections.
  s.tcp_ecn = config.ecn ? "1" : "0";
  s.tcp_sack = config.sack ? "1" : "0";
  s.tcp_window_scaling = config.ws ? "1" : "0";
  if (config.ws) {
    auto f = Fields(base.tcp_rmem);
    if (f.size() != 3) throw SysctlError("unexpected tcp_rmem format: " + base.tcp_rmem);
    f[2] = std::to_string(ReceiveBufferForShift(config.ws_shift));
    s.tcp_rmem = f[0] + " " + f[1] + " " + f[2];
  }
  return s;
}

AppliedOptions::AppliedOptions(const OptionConfig& config)
    : previous_(HostTcpSettings::Read()), applied_(SettingsFor(config, previous_)) {
  try {
    applied_.Apply();
  } catch (...) {
    try {
      previous_.Apply();
    } catch (...) {
    }
    throw;
  }
}

AppliedOptions::~AppliedOptions() {
  try {
    previous_.Apply();
  } catch (...) {
  }
}

std::string SynSignature::ToString() const {
  std::string s = ws_shift ? "WS(" + std::to_string(*ws_shift) + ")" : "no-WS";
  s += sack_permitted ? " SACK-permitted" : " no-SACK";
  s += ecn_setup ? " ECE|CWR" : " no-ECN";
  return s;
}

SynSignature ExpectedSyn(const OptionConfig& config) {
  SynSignature s;
  if (config.ws) s.ws_shift = static_cast<uint8_t>(config.ws_shift);
  s.sack_permitted = config.sack;
  s.ecn_setup = config.ecn;
  return s;
}

std::optional<SynSignature> FirstSyn(std::span<const capture::PacketRecord> packets) {
  for (const auto& p : packets) {
    if (!p.is_tcp() || !p.has_flag(capture::tcp_flags::kSyn) || p.has_flag(capture::tcp_flags::kAck)) continue;
    SynSignature s;
    s.ws_shift = p.tcp_options.window_scale;
    s.sack_permitted = p.tcp_options.sack_permitted;
    s.ecn_setup = p.has_flag(capture::tcp_flags::kEce) && p.has_flag(capture::tcp_flags::kCwr);
    return s;
  }
  return std::nullopt;
}

}  // namespace optperf::orchestrator

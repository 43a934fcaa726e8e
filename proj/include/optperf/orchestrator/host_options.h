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

#ifndef OPTPERF_ORCHESTRATOR_HOST_OPTIONS_H_
#define OPTPERF_ORCHESTRATOR_HOST_OPTIONS_H_

#include <cstdint>
#include <string>

#include <optional>
#include <span>

#include "optperf/capture/packet.h"
#include "optperf/orchestrator/option_config.h"

namespace optperf::orchestrator {

// The host-wide TCP settings a configuration touches.
struct HostTcpSettings {
  std::string tcp_ecn;
  std::string tcp_sack;
  std::string tcp_window_scaling;
  std::string tcp_rmem;  // "min default max"

  static HostTcpSettings Read();
  // Writes every field, then reads back and throws SysctlError on mismatch.
  void Apply() const;

  friend bool operator==(const HostTcpSettings&, const HostTcpSettings&) = default;
};

// Maximum receive buffer that makes Linux announce `shift` in its SYN:
// the kernel picks ilog2(max(tcp_rmem[2], rmem_max)) - 15.
uint64_t ReceiveBufferForShift(int shift);

// Settings realizing `config`, starting from `base` (used for rmem when
// window scaling is off). QUIC configs leave TCP settings at `base`.
HostTcpSettings SettingsFor(const OptionConfig& config, const HostTcpSettings& base);

// configure_options: applies a configuration to the calling thread's
// network namespace and restores the previous settings when destroyed.
class AppliedOptions {
 public:
  explicit AppliedOptions(const OptionConfig& config);
  ~AppliedOptions();
  AppliedOptions(const AppliedOptions&) = delete;
  AppliedOptions& operator=(const AppliedOptions&) = delete;

  const HostTcpSettings& previous() const { return previous_; }
  const HostTcpSettings& applied() const { return applied_; }

 private:
  HostTcpSettings previous_;
  HostTcpSettings applied_;
};

// Option set announced by a client SYN.
struct SynSignature {
  std::optional<uint8_t> ws_shift;
  bool sack_permitted = false;
  bool ecn_setup = false;  // ECE and CWR both set

  std::string ToString() const;
  friend bool operator==(const SynSignature&, const SynSignature&) = default;
};

// The signature a SYN sent under `config` must carry.
SynSignature ExpectedSyn(const OptionConfig& config);
// First SYN without ACK in `packets`.
std::optional<SynSignature> FirstSyn(std::span<const capture::PacketRecord> packets);

}  // namespace optperf::orchestrator

#endif  // OPTPERF_ORCHESTRATOR_HOST_OPTIONS_H_

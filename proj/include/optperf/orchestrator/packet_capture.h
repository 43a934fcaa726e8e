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

#ifndef OPTPERF_ORCHESTRATOR_PACKET_CAPTURE_H_
#define OPTPERF_ORCHESTRATOR_PACKET_CAPTURE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "optperf/common/ip_address.h"

namespace optperf::orchestrator {

class CaptureUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CaptureFilter {
  // Keep packets to or from this address; unset keeps every address.
  std::optional<IpAddress> host;
  // Keep packets with either port in this list; empty keeps every port.
  std::vector<uint16_t> ports;
};

struct CaptureStats {
  uint64_t seen = 0;     // frames received from the kernel
  uint64_t written = 0;  // frames matching the filter
  uint64_t kernel_drops = 0;
};

// Live capture on an AF_PACKET socket opened in the calling thread's
// network namespace. Frames are written as raw IP packets (pcap link
// type 101), truncated to `snaplen`.
class PacketCapture {
 public:
  PacketCapture(const std::filesystem::path& output, CaptureFilter filter,
                const std::string& interface = "", uint32_t snaplen = 256);
  ~PacketCapture();
  PacketCapture(const PacketCapture&) = delete;
  PacketCapture& operator=(const PacketCapture&) = delete;

  // Drains pending frames and closes the file. Idempotent.
  CaptureStats Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace optperf::orchestrator

#endif  // OPTPERF_ORCHESTRATOR_PACKET_CAPTURE_H_

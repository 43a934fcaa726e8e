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

#ifndef OPTPERF_TESTBED_PATH_EMULATOR_H_
#define OPTPERF_TESTBED_PATH_EMULATOR_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>

namespace optperf::testbed {

// A TUN interface (no packet-information header) in the calling thread's
// namespace.
class TunDevice {
 public:
  explicit TunDevice(const std::string& name);
  TunDevice(TunDevice&& o) noexcept;
  TunDevice(const TunDevice&) = delete;
  TunDevice& operator=(const TunDevice&) = delete;
  ~TunDevice();

  int fd() const { return fd_; }
  const std::string& name() const { return name_; }

 private:
  int fd_ = -1;
  std::string name_;
};

struct PathParams {
  std::chrono::microseconds delay_ab{0};
  std::chrono::microseconds delay_ba{0};
  // Per-direction bottleneck rate; 0 means unlimited.
  double rate_bps = 0;
};

// Moves IP packets between two TUN devices with a fixed one-way delay and
// an optional serialization rate. Queues are unbounded, so the path never
// drops.
class PathEmulator {
 public:
  enum Direction { kAtoB = 0, kBtoA = 1 };
  using Tap = std::function<void(Direction, int64_t realtime_ns, std::span<const uint8_t>)>;

  struct Stats {
    uint64_t packets[2] = {0, 0};
    uint64_t bytes[2] = {0, 0};
    size_t max_queue[2] = {0, 0};
  };

  PathEmulator(int fd_a, int fd_b, PathParams params);
  ~PathEmulator();
  PathEmulator(const PathEmulator&) = delete;
  PathEmulator& operator=(const PathEmulator&) = delete;

  void SetParams(PathParams params);
  PathParams params() const;
  // Called on the emulator thread for every delivered packet.
  void SetTap(Tap tap);

  void Start();
  void Stop();
  Stats stats() const;

 private:
  void Loop();

  const int fds_[2];
  int wake_fd_ = -1;
  mutable std::mutex mu_;
  PathParams params_;
  Tap tap_;
  Stats stats_;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

}  // namespace optperf::testbed

#endif  // OPTPERF_TESTBED_PATH_EMULATOR_H_

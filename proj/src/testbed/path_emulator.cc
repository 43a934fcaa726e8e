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

#include "optperf/testbed/path_emulator.h"

#include <fcntl.h>
#include <linux/if_tun.h>
#include <net/if.h>
#include <poll.h>
#include <pthread.h>
#include <sched.h>
#include <sys/eventfd.h>
#include <sys/ioctl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>
#include <vector>

#include "optperf/testbed/netns.h"

namespace optperf::testbed {
namespace {

using Clock = std::chrono::steady_clock;

int64_t RealtimeNs() {
  timespec ts{};
  clock_gettime(CLOCK_REALTIME, &ts);
  return int64_t{ts.tv_sec} * 1'000'000'000 + ts.tv_nsec;
}

struct Pending {
  Clock::time_point due;
  std::vector<uint8_t> data;
};

}  // namespace

TunDevice::TunDevice(const std::string& name) : name_(name) {
  fd_ = ::open("/dev/net/tun", O_RDWR | O_CLOEXEC | O_NONBLOCK);
  if (fd_ < 0) throw NetnsError(std::string("open /dev/net/tun: ") + std::strerror(errno));
  ifreq r{};
  std::strncpy(r.ifr_name, name.c_str(), IFNAMSIZ - 1);
  r.ifr_flags = IFF_TUN | IFF_NO_PI;
  if (::ioctl(fd_, TUNSETIFF, &r) != 0) {
    const int err = errno;
    ::close(fd_);
    throw NetnsError("TUNSETIFF " + name + ": " + std::strerror(err));
  }
}

TunDevice::TunDevice(TunDevice&& o) noexcept : fd_(std::exchange(o.fd_, -1)), name_(o.name_) {}

TunDevice::~TunDevice() {
  if (fd_ >= 0) ::close(fd_);
}

PathEmulator::PathEmulator(int fd_a, int fd_b, PathParams params)
    : fds_{fd_a, fd_b}, params_(params) {
  wake_fd_ = ::eventfd(0, EFD_NONBLOCK | EFD_CLOEXEC);
  if (wake_fd_ < 0) throw NetnsError(std::string("eventfd: ") + std::strerror(errno));
}

PathEmulator::~PathEmulator() {
  Stop();
  ::close(wake_fd_);
}

void PathEmulator::SetParams(PathParams params) {
  std::lock_guard lock(mu_);
  params_ = params;
}

PathParams PathEmulator::params() const {
  std::lock_guard lock(mu_);
  return params_;
}

void PathEmulator::SetTap(Tap tap) {
  std::lock_guard lock(mu_);
  tap_ = std::move(tap);
}

PathEmulator::Stats PathEmulator::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

void PathEmulator::Start() {
  if (thread_.joinable()) return;
  stop_ = false;
  thread_ = std::thread([this] { Loop(); });
  // Delivery timing matters more than anything else in the process; this
  // fails harmlessly without CAP_SYS_NICE.
  sched_param sp{};
  sp.sched_priority = 10;
  pthread_setschedparam(thread_.native_handle(), SCHED_FIFO, &sp);
}

void PathEmulator::Stop() {
  if (!thread_.joinable()) return;
  stop_ = true;
  const uint64_t one = 1;
  [[maybe_unused]] auto n = ::write(wake_fd_, &one, sizeof one);
  thread_.join();
}

void PathEmulator::Loop() {
  std::deque<Pending> queues[2];
  Clock::time_point last_departure[2] = {Clock::time_point::min(), Clock::time_point::min()};
  std::vector<uint8_t> buf(65536);

  while (!stop_) {
    pollfd pfds[3] = {{fds_[0], POLLIN, 0}, {fds_[1], POLLIN, 0}, {wake_fd_, POLLIN, 0}};
    timespec timeout{};
    timespec* tp = nullptr;
    Clock::time_point next = Clock::time_point::max();
    for (const auto& q : queues) {
      if (!q.empty() && q.front().due < next) next = q.front().due;
    }
    if (next != Clock::time_point::max()) {
      const auto wait = std::max(next - Clock::now(), Clock::duration::zero());
      const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(wait).count();
      timeout.tv_sec = ns / 1'000'000'000;
      timeout.tv_nsec = ns % 1'000'000'000;
      tp = &timeout;
    }
    if (::ppoll(pfds, 3, tp, nullptr) < 0 && errno != EINTR) break;
    if (pfds[2].revents & POLLIN) {
      uint64_t v;
      [[maybe_unused]] auto n = ::read(wake_fd_, &v, sizeof v);
    }

    const PathParams p = params();
    for (int dir = 0; dir < 2; ++dir) {
      if (!(pfds[dir].revents & POLLIN)) continue;
      for (;;) {
        const ssize_t n = ::read(fds_[dir], buf.data(), buf.size());
        if (n <= 0) break;
        const auto now = Clock::now();
        Clock::time_point depart = now;
        if (p.rate_bps > 0) {
          const auto tx = std::chrono::nanoseconds(
              static_cast<int64_t>(static_cast<double>(n) * 8e9 / p.rate_bps));
          depart = std::max(now, last_departure[dir]) + tx;
          last_departure[dir] = depart;
        }
        const auto delay = dir == kAtoB ? p.delay_ab : p.delay_ba;
        queues[dir].push_back({depart + delay, std::vector<uint8_t>(buf.begin(), buf.begin() + n)});
      }
    }

    const auto now = Clock::now();
    for (int dir = 0; dir < 2; ++dir) {
      auto& q = queues[dir];
      while (!q.empty() && q.front().due <= now) {
        const auto& pkt = q.front();
        [[maybe_unused]] auto n = ::write(fds_[1 - dir], pkt.data.data(), pkt.data.size());
        std::lock_guard lock(mu_);
        ++stats_.packets[dir];
        stats_.bytes[dir] += pkt.data.size();
        if (tap_) tap_(static_cast<Direction>(dir), RealtimeNs(), pkt.data);
        q.pop_front();
      }
      std::lock_guard lock(mu_);
      stats_.max_queue[dir] = std::max(stats_.max_queue[dir], q.size());
    }
  }
}

}  // namespace optperf::testbed

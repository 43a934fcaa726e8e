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

#ifndef OPTPERF_TESTBED_NETNS_H_
#define OPTPERF_TESTBED_NETNS_H_

#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace optperf::testbed {

class NetnsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A network namespace pinned by an open file descriptor. The namespace lives
// as long as the object (or any socket created inside it).
class NetNamespace {
 public:
  // Fresh namespace with the loopback interface up. Requires CAP_SYS_ADMIN.
  static NetNamespace Create();
  // The calling thread's current namespace.
  static NetNamespace Current();

  NetNamespace(NetNamespace&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  NetNamespace& operator=(NetNamespace&& o) noexcept;
  NetNamespace(const NetNamespace&) = delete;
  NetNamespace& operator=(const NetNamespace&) = delete;
  ~NetNamespace();

  int fd() const { return fd_; }

  // Moves the calling thread into the namespace until destruction. Threads
  // and child processes started meanwhile inherit it.
  class Scope {
   public:
    explicit Scope(const NetNamespace& ns);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    int saved_ = -1;
  };

  // Runs `fn` inside the namespace on the calling thread.
  template <typename F>
  auto Run(F&& fn) const {
    Scope s(*this);
    return fn();
  }

 private:
  explicit NetNamespace(int fd) : fd_(fd) {}
  int fd_ = -1;
};

// Interface helpers operating in the calling thread's namespace.
void SetInterfaceUp(const std::string& ifname);
// `ifname` may carry an alias label ("opt0:1").
void SetIpv4Address(const std::string& ifname, const std::string& address, int prefix_len);
void SetTxQueueLen(const std::string& ifname, int len);

}  // namespace optperf::testbed

#endif  // OPTPERF_TESTBED_NETNS_H_

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

#include "optperf/testbed/netns.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <net/if.h>
#include <netinet/in.h>
#include <sched.h>
#include <sys/ioctl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace optperf::testbed {
namespace {

[[noreturn]] void Fail(const std::string& what) {
  throw NetnsError(what + ": " + std::strerror(errno));
}

int OpenSelfNs() {
  const int fd = ::open("/proc/thread-self/ns/net", O_RDONLY | O_CLOEXEC);
  if (fd < 0) Fail("open /proc/thread-self/ns/net");
  return fd;
}

class IfSocket {
 public:
  IfSocket() : fd_(::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0)) {
    if (fd_ < 0) Fail("socket");
  }
  ~IfSocket() { ::close(fd_); }
  void Ioctl(unsigned long req, ifreq& r, const char* what) {
    if (::ioctl(fd_, req, &r) != 0) Fail(std::string(what) + " " + r.ifr_name);
  }

 private:
  int fd_;
};

ifreq Named(const std::string& ifname) {
  ifreq r{};
  if (ifname.size() >= IFNAMSIZ) throw NetnsError("interface name too long: " + ifname);
  std::memcpy(r.ifr_name, ifname.c_str(), ifname.size());
  return r;
}

}  // namespace

NetNamespace NetNamespace::Create() {
  int fd = -1;
  std::string error;
  // unshare() affects only the calling thread for CLONE_NEWNET, so a helper
  // thread creates the namespace and the fd keeps it alive.
  std::thread t([&] {
    if (::unshare(CLONE_NEWNET) != 0) {
      error = std::string("unshare(CLONE_NEWNET): ") + std::strerror(errno);
      return;
    }
    try {
      fd = OpenSelfNs();
      SetInterfaceUp("lo");
    } catch (const std::exception& e) {
      error = e.what();
    }
  });
  t.join();
  if (!error.empty()) {
    if (fd >= 0) ::close(fd);
    throw NetnsError(error);
  }
  return NetNamespace(fd);
}

NetNamespace NetNamespace::Current() { return NetNamespace(OpenSelfNs()); }

NetNamespace& NetNamespace::operator=(NetNamespace&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(o.fd_, -1);
  }
  return *this;
}

NetNamespace::~NetNamespace() {
  if (fd_ >= 0) ::close(fd_);
}

NetNamespace::Scope::Scope(const NetNamespace& ns) : saved_(OpenSelfNs()) {
  if (::setns(ns.fd(), CLONE_NEWNET) != 0) {
    const int err = errno;
    ::close(saved_);
    errno = err;
    Fail("setns");
  }
}

NetNamespace::Scope::~Scope() {
  ::setns(saved_, CLONE_NEWNET);
  ::close(saved_);
}

void SetInterfaceUp(const std::string& ifname) {
  IfSocket s;
  ifreq r = Named(ifname);
  s.Ioctl(SIOCGIFFLAGS, r, "SIOCGIFFLAGS");
  r.ifr_flags |= IFF_UP | IFF_RUNNING;
  s.Ioctl(SIOCSIFFLAGS, r, "SIOCSIFFLAGS");
}

void SetIpv4Address(const std::string& ifname, const std::string& address, int prefix_len) {
  IfSocket s;
  ifreq r = Named(ifname);
  auto* sin = reinterpret_cast<sockaddr_in*>(&r.ifr_addr);
  sin->sin_family = AF_INET;
  if (::inet_pton(AF_INET, address.c_str(), &sin->sin_addr) != 1) {
    throw NetnsError("bad IPv4 address " + address);
  }
  s.Ioctl(SIOCSIFADDR, r, "SIOCSIFADDR");
  const uint32_t mask = prefix_len == 0 ? 0 : ~uint32_t{0} << (32 - prefix_len);
  sin->sin_addr.s_addr = htonl(mask);
  s.Ioctl(SIOCSIFNETMASK, r, "SIOCSIFNETMASK");
}

void SetTxQueueLen(const std::string& ifname, int len) {
  IfSocket s;
  ifreq r = Named(ifname);
  r.ifr_qlen = len;
  s.Ioctl(SIOCSIFTXQLEN, r, "SIOCSIFTXQLEN");
}

}  // namespace optperf::testbed

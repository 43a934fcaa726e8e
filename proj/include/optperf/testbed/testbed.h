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

#ifndef OPTPERF_TESTBED_TESTBED_H_
#define OPTPERF_TESTBED_TESTBED_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "optperf/testbed/netns.h"
#include "optperf/testbed/path_emulator.h"

namespace optperf::testbed {

// Two network namespaces joined by an emulated path:
//
//   client ns [opt0 10.77.0.1/24] <-- PathEmulator --> [opt0 10.77.0.2/24, aliases] server ns
//
// Direction kAtoB of the emulator is client to server.
class Testbed {
 public:
  explicit Testbed(PathParams params = {});
  ~Testbed();
  Testbed(const Testbed&) = delete;
  Testbed& operator=(const Testbed&) = delete;

  const NetNamespace& client() const { return client_ns_; }
  const NetNamespace& server() const { return server_ns_; }
  PathEmulator& path() { return *emulator_; }

  const std::string& client_ip() const { return client_ip_; }
  const std::string& server_ip() const { return server_ips_.front(); }
  // Assigns one more address to the server side and returns it.
  std::string AddServerAddress();

  // Unused address on the server subnet; packets to it are silently dropped.
  static std::string BlackholeAddress() { return "10.77.0.250"; }
  static constexpr const char* kInterface = "opt0";

 private:
  NetNamespace client_ns_;
  NetNamespace server_ns_;
  std::optional<TunDevice> client_tun_;
  std::optional<TunDevice> server_tun_;
  std::unique_ptr<PathEmulator> emulator_;
  std::string client_ip_ = "10.77.0.1";
  std::vector<std::string> server_ips_;
};

}  // namespace optperf::testbed

#endif  // OPTPERF_TESTBED_TESTBED_H_

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

#include "optperf/testbed/testbed.h"

namespace optperf::testbed {
namespace {

void ConfigureSide(std::optional<TunDevice>& tun, const std::string& ip) {
  tun.emplace(Testbed::kInterface);
  SetIpv4Address(Testbed::kInterface, ip, 24);
  SetTxQueueLen(Testbed::kInterface, 10000);
  SetInterfaceUp(Testbed::kInterface);
}

}  // namespace

Testbed::Testbed(PathParams params)
    : client_ns_(NetNamespace::Create()), server_ns_(NetNamespace::Create()) {
  server_ips_.push_back("10.77.0.2");
  client_ns_.Run([&] { ConfigureSide(client_tun_, client_ip_); });
  server_ns_.Run([&] { ConfigureSide(server_tun_, server_ips_.front()); });
  emulator_ = std::make_unique<PathEmulator>(client_tun_->fd(), server_tun_->fd(), params);
  emulator_->Start();
}

Testbed::~Testbed() { emulator_->Stop(); }

std::string Testbed::AddServerAddress() {
  const size_t n = server_ips_.size();
  const std::string ip = "10.77.0." + std::to_string(2 + n);
  server_ns_.Run([&] {
    SetIpv4Address(std::string(kInterface) + ":" + std::to_string(n), ip, 24);
  });
  server_ips_.push_back(ip);
  return ip;
}

}  // namespace optperf::testbed

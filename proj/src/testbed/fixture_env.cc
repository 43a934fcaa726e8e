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

#include "optperf/testbed/fixture_env.h"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>

#include <chrono>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "optperf/testbed/certs.h"

namespace optperf::testbed {

FixtureEnvironment::FixtureEnvironment(PathParams params, const std::filesystem::path& workdir)
    : bed_(params), workdir_(workdir) {
  std::filesystem::create_directories(workdir_);
  ca_ = std::make_unique<CertificateAuthority>("optperf fixture CA");
  ca_file_ = workdir_ / "ca.pem";
  ca_->WriteCaCert(ca_file_);
  hosts_file_ = workdir_ / "hosts";
  WriteHosts();
}

FixtureEnvironment::~FixtureEnvironment() {
  for (auto& s : servers_) s->Stop();
  for (int pid : quic_pids_) {
    kill(pid, SIGTERM);
    waitpid(pid, nullptr, 0);
  }
}

FixtureServer& FixtureEnvironment::AddServer(const std::vector<std::string>& names) {
  const std::string ip = next_address_++ == 0 ? bed_.server_ip() : bed_.AddServerAddress();
  const std::string stem = "server" + std::to_string(servers_.size());
  const auto cert = workdir_ / (stem + ".pem");
  const auto key = workdir_ / (stem + ".key");
  ca_->Issue(names, cert, key);
  auto server = std::make_unique<FixtureServer>(cert, key);
  bed_.server().Run([&] { server->Listen(ip, 443); });
  for (const auto& n : names) {
    names_[n] = ip;
    credentials_[n] = workdir_ / stem;
  }
  WriteHosts();
  servers_.push_back(std::move(server));
  return *servers_.back();
}

void FixtureEnvironment::AddQuicServer(const std::string& name,
                                       const std::filesystem::path& script,
                                       const std::map<std::string, size_t>& files) {
  auto cred = credentials_.find(name);
  if (cred == credentials_.end()) throw std::runtime_error("no fixture server for " + name);
  const auto ready = workdir_ / ("quic" + std::to_string(quic_pids_.size()) + ".ready");
  std::filesystem::remove(ready);
  std::vector<std::string> args = {"python3",
                                   script.string(),
                                   "--cert",
                                   cred->second.string() + ".pem",
                                   "--key",
                                   cred->second.string() + ".key",
                                   "--address",
                                   names_.at(name),
                                   "--port",
                                   "443",
                                   "--ready-file",
                                   ready.string()};
  for (const auto& [path, size] : files) {
    args.push_back("--file");
    args.push_back(path + "=" + std::to_string(size));
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  const int rc = bed_.server().Run(
      [&] { return posix_spawnp(&pid, "python3", nullptr, nullptr, argv.data(), environ); });
  if (rc != 0) throw std::runtime_error("cannot start python3 for the QUIC fixture");
  quic_pids_.push_back(pid);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
  while (!std::filesystem::exists(ready)) {
    int status = 0;
    if (waitpid(pid, &status, WNOHANG) == pid) {
      quic_pids_.pop_back();
      throw std::runtime_error("QUIC fixture server exited during startup");
    }
    if (std::chrono::steady_clock::now() > deadline) {
      throw std::runtime_error("QUIC fixture server did not start");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

void FixtureEnvironment::MapName(const std::string& name, const std::string& address) {
  names_[name] = address;
  WriteHosts();
}

std::string FixtureEnvironment::AddressOf(const std::string& name) const {
  auto it = names_.find(name);
  return it == names_.end() ? "" : it->second;
}

std::shared_ptr<net::SystemResolver> FixtureEnvironment::resolver() const {
  auto r = std::make_shared<net::SystemResolver>();
  r->LoadHostsFile(hosts_file_);
  r->set_overrides_only(true);
  return r;
}

void FixtureEnvironment::WriteHosts() const {
  std::ofstream out(hosts_file_, std::ios::trunc);
  out << "# fixture names\n";
  for (const auto& [name, ip] : names_) out << ip << ' ' << name << '\n';
}

}  // namespace optperf::testbed

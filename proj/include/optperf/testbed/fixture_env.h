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

#ifndef OPTPERF_TESTBED_FIXTURE_ENV_H_
#define OPTPERF_TESTBED_FIXTURE_ENV_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "optperf/net/resolver.h"
#include "optperf/testbed/fixture_server.h"
#include "optperf/testbed/testbed.h"

namespace optperf::testbed {

// Testbed plus HTTPS fixture servers and the files a client needs to reach
// them: a CA bundle and a hosts file. Each server gets its own address on
// the server side and a certificate for its names.
class FixtureEnvironment {
 public:
  FixtureEnvironment(PathParams params, const std::filesystem::path& workdir);
  ~FixtureEnvironment();

  Testbed& bed() { return bed_; }
  const std::filesystem::path& workdir() const { return workdir_; }
  const std::filesystem::path& ca_file() const { return ca_file_; }
  const std::filesystem::path& hosts_file() const { return hosts_file_; }

  // Starts a server on a new address for `names` (first name first in the
  // certificate) and maps every name to that address in the hosts file.
  FixtureServer& AddServer(const std::vector<std::string>& names);
  // Serves `files` (path -> size) over HTTP/3 on UDP port 443 of the
  // address of `name`, which an earlier AddServer call must have named,
  // with the same certificate. Runs the Python fixture at `script` in the
  // server namespace and returns once it listens. Throws std::runtime_error
  // if it does not come up within ten seconds.
  void AddQuicServer(const std::string& name, const std::filesystem::path& script,
                     const std::map<std::string, size_t>& files);

  // Maps `name` to `address` without a certificate for it.
  void MapName(const std::string& name, const std::string& address);
  std::string AddressOf(const std::string& name) const;

  // Resolver restricted to the hosts file.
  std::shared_ptr<net::SystemResolver> resolver() const;

 private:
  void WriteHosts() const;

  Testbed bed_;
  std::filesystem::path workdir_;
  std::filesystem::path ca_file_;
  std::filesystem::path hosts_file_;
  std::unique_ptr<class CertificateAuthority> ca_;
  std::vector<std::unique_ptr<FixtureServer>> servers_;
  std::map<std::string, std::string> names_;
  // Certificate stem (without extension) per name.
  std::map<std::string, std::filesystem::path> credentials_;
  std::vector<int> quic_pids_;
  size_t next_address_ = 0;
};

}  // namespace optperf::testbed

#endif  // OPTPERF_TESTBED_FIXTURE_ENV_H_

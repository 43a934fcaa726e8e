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

#ifndef OPTPERF_COMMON_SYSCTL_H_
#define OPTPERF_COMMON_SYSCTL_H_

#include <filesystem>
#include <stdexcept>
#include <string>

namespace optperf {

class SysctlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Keys use dotted notation ("net.ipv4.tcp_ecn"). Values are read and written
// through /proc/sys, so network keys refer to the calling thread's network
// namespace.
std::filesystem::path SysctlPath(const std::string& key);
std::string ReadSysctl(const std::string& key);
void WriteSysctl(const std::string& key, const std::string& value);

}  // namespace optperf

#endif  // OPTPERF_COMMON_SYSCTL_H_

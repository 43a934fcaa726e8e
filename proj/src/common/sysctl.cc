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

#include "optperf/common/sysctl.h"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace optperf {

std::filesystem::path SysctlPath(const std::string& key) {
  std::string rel = key;
  for (char& c : rel) {
    if (c == '.') c = '/';
  }
  return std::filesystem::path("/proc/sys") / rel;
}

std::string ReadSysctl(const std::string& key) {
  std::ifstream in(SysctlPath(key));
  if (!in) throw SysctlError("cannot read " + key + ": " + std::strerror(errno));
  std::stringstream ss;
  ss << in.rdbuf();
  std::string v = ss.str();
  while (!v.empty() && (v.back() == '\n' || v.back() == ' ')) v.pop_back();
  // Multi-value keys use tabs; normalize to single spaces.
  for (char& c : v) {
    if (c == '\t') c = ' ';
  }
  return v;
}

void WriteSysctl(const std::string& key, const std::string& value) {
  std::ofstream out(SysctlPath(key));
  if (!out) {
    const int err = errno;
    std::string msg = "cannot write " + key + ": " + std::strerror(err);
    if (err == EACCES || err == EPERM || err == EROFS) {
      msg += " (run as root or with CAP_NET_ADMIN in a writable network namespace)";
    }
    throw SysctlError(msg);
  }
  out << value << '\n';
  out.flush();
  if (!out) throw SysctlError("write to " + key + " rejected: " + std::strerror(errno));
}

}  // namespace optperf

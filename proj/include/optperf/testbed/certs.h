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

#ifndef OPTPERF_TESTBED_CERTS_H_
#define OPTPERF_TESTBED_CERTS_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace optperf::testbed {

// Throwaway certificate authority for fixture TLS servers. Keys are P-256.
class CertificateAuthority {
 public:
  explicit CertificateAuthority(const std::string& common_name);
  ~CertificateAuthority();
  CertificateAuthority(const CertificateAuthority&) = delete;
  CertificateAuthority& operator=(const CertificateAuthority&) = delete;

  void WriteCaCert(const std::filesystem::path& path) const;
  // Leaf certificate whose subjectAltName lists every entry of `dns_names`.
  void Issue(const std::vector<std::string>& dns_names, const std::filesystem::path& cert_path,
             const std::filesystem::path& key_path);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace optperf::testbed

#endif  // OPTPERF_TESTBED_CERTS_H_

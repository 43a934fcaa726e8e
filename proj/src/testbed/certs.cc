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

#include "optperf/testbed/certs.h"

#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <cstdio>
#include <stdexcept>

namespace optperf::testbed {
namespace {

void Check(bool ok, const char* what) {
  if (!ok) throw std::runtime_error(std::string("certificate generation failed: ") + what);
}

EVP_PKEY* NewKey() {
  EVP_PKEY* key = EVP_EC_gen("P-256");
  Check(key != nullptr, "EVP_EC_gen");
  return key;
}

void AddExt(X509* cert, X509* issuer, int nid, const char* value) {
  X509V3_CTX ctx;
  X509V3_set_ctx_nodb(&ctx);
  X509V3_set_ctx(&ctx, issuer, cert, nullptr, nullptr, 0);
  X509_EXTENSION* ext = X509V3_EXT_conf_nid(nullptr, &ctx, nid, value);
  Check(ext != nullptr, "X509V3_EXT_conf_nid");
  X509_add_ext(cert, ext, -1);
  X509_EXTENSION_free(ext);
}

X509* NewCert(EVP_PKEY* key, const std::string& cn, long serial) {
  X509* cert = X509_new();
  Check(cert != nullptr, "X509_new");
  X509_set_version(cert, 2);
  ASN1_INTEGER_set(X509_get_serialNumber(cert), serial);
  X509_gmtime_adj(X509_getm_notBefore(cert), -3600);
  X509_gmtime_adj(X509_getm_notAfter(cert), 3600L * 24 * 30);
  X509_set_pubkey(cert, key);
  X509_NAME* name = X509_get_subject_name(cert);
  X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_ASC,
                             reinterpret_cast<const unsigned char*>(cn.c_str()), -1, -1, 0);
  return cert;
}

FILE* OpenOrThrow(const std::filesystem::path& p) {
  FILE* f = std::fopen(p.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

struct CertificateAuthority::Impl {
  EVP_PKEY* key = nullptr;
  X509* cert = nullptr;
  long next_serial = 2;
  ~Impl() {
    X509_free(cert);
    EVP_PKEY_free(key);
  }
};

CertificateAuthority::CertificateAuthority(const std::string& common_name)
    : impl_(std::make_unique<Impl>()) {
  impl_->key = NewKey();
  impl_->cert = NewCert(impl_->key, common_name, 1);
  X509_set_issuer_name(impl_->cert, X509_get_subject_name(impl_->cert));
  AddExt(impl_->cert, impl_->cert, NID_basic_constraints, "critical,CA:TRUE");
  AddExt(impl_->cert, impl_->cert, NID_key_usage, "critical,keyCertSign,cRLSign");
  AddExt(impl_->cert, impl_->cert, NID_subject_key_identifier, "hash");
  Check(X509_sign(impl_->cert, impl_->key, EVP_sha256()) > 0, "sign CA");
}

CertificateAuthority::~CertificateAuthority() = default;

void CertificateAuthority::WriteCaCert(const std::filesystem::path& path) const {
  FILE* f = OpenOrThrow(path);
  const bool ok = PEM_write_X509(f, impl_->cert) == 1;
  std::fclose(f);
  Check(ok, "PEM_write_X509");
}

void CertificateAuthority::Issue(const std::vector<std::string>& dns_names,
                                 const std::filesystem::path& cert_path,
                                 const std::filesystem::path& key_path) {
  Check(!dns_names.empty(), "no names");
  EVP_PKEY* key = NewKey();
  X509* cert = NewCert(key, dns_names.front(), impl_->next_serial++);
  X509_set_issuer_name(cert, X509_get_subject_name(impl_->cert));
  std::string san;
  for (const auto& n : dns_names) {
    if (!san.empty()) san += ',';
    san += "DNS:" + n;
  }
  AddExt(cert, impl_->cert, NID_subject_alt_name, san.c_str());
  AddExt(cert, impl_->cert, NID_basic_constraints, "critical,CA:FALSE");
  AddExt(cert, impl_->cert, NID_ext_key_usage, "serverAuth");
  AddExt(cert, impl_->cert, NID_authority_key_identifier, "keyid:always");
  const bool signed_ok = X509_sign(cert, impl_->key, EVP_sha256()) > 0;

  FILE* cf = OpenOrThrow(cert_path);
  const bool cert_ok = PEM_write_X509(cf, cert) == 1;
  std::fclose(cf);
  FILE* kf = OpenOrThrow(key_path);
  const bool key_ok = PEM_write_PrivateKey(kf, key, nullptr, nullptr, 0, nullptr, nullptr) == 1;
  std::fclose(kf);
  X509_free(cert);
  EVP_PKEY_free(key);
  Check(signed_ok && cert_ok && key_ok, "leaf");
}

}  // namespace optperf::testbed

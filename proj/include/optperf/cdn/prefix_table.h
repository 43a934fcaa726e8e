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

#ifndef OPTPERF_CDN_PREFIX_TABLE_H_
#define OPTPERF_CDN_PREFIX_TABLE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "optperf/common/ip_address.h"

namespace optperf::cdn {

using Asn = uint32_t;

struct Prefix {
  IpAddress address;  // host bits cleared
  uint8_t length = 0;

  // "192.0.2.0/24" or "2001:db8::/32".
  static std::optional<Prefix> Parse(std::string_view text);
  static Prefix Of(const IpAddress& address, uint8_t length);
  bool Contains(const IpAddress& a) const;
  std::string ToString() const;

  friend auto operator<=>(const Prefix&, const Prefix&) = default;
  friend bool operator==(const Prefix&, const Prefix&) = default;
};

struct PrefixEntry {
  Prefix prefix;
  std::vector<Asn> origins;  // sorted, unique; more than one for MOAS/AS_SET
};

class PrefixTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadStats {
  size_t records = 0;
  size_t skipped = 0;
};

// Longest-prefix-match table over IPv4 and IPv6 prefixes, backed by one
// binary trie per family. Immutable once loaded; lookups are thread-safe.
class PrefixTable {
 public:
  PrefixTable();

  // Adds origins to `prefix`, merging with any origins already present.
  void Add(const Prefix& prefix, std::span<const Asn> origins);

  const PrefixEntry* Lookup(const IpAddress& address) const;
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<PrefixEntry>& entries() const { return entries_; }

  LoadStats stats;

 private:
  struct Node {
    int32_t child[2] = {-1, -1};
    int32_t entry = -1;
  };
  std::vector<Node>& trie(IpFamily f) { return f == IpFamily::kV4 ? v4_ : v6_; }
  const std::vector<Node>& trie(IpFamily f) const { return f == IpFamily::kV4 ? v4_ : v6_; }

  std::vector<Node> v4_;
  std::vector<Node> v6_;
  std::vector<PrefixEntry> entries_;
};

// Tab-separated prefix-to-AS text: "prefix<TAB>length<TAB>asn", where asn
// may list several origins separated by '_' (multi-origin) or ',' (AS set).
// Lines starting with '#' are comments.
PrefixTable ParsePrefix2As(std::string_view text);

// MRT TABLE_DUMP_V2 RIB dump (uncompressed). Only the origin AS of each
// path is kept; an AS_SET in origin position contributes all its members.
PrefixTable ParseMrt(std::span<const uint8_t> bytes);

// Picks the format from the file contents. Throws PrefixTableError when the
// file cannot be read or yields no prefixes.
PrefixTable LoadPrefixTable(const std::filesystem::path& path);

}  // namespace optperf::cdn

#endif  // OPTPERF_CDN_PREFIX_TABLE_H_

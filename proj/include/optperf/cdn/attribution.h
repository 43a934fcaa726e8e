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

#ifndef OPTPERF_CDN_ATTRIBUTION_H_
#define OPTPERF_CDN_ATTRIBUTION_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optperf/cdn/prefix_table.h"

namespace optperf::cdn {

// Declaration order is the tie-break order for ambiguous domains.
enum class CdnGroup : uint8_t { kAkamai, kAmazon, kCloudflare, kGoogle, kMicrosoft, kOthers };

inline constexpr std::array<CdnGroup, 6> kAllGroups = {
    CdnGroup::kAkamai, CdnGroup::kAmazon,    CdnGroup::kCloudflare,
    CdnGroup::kGoogle, CdnGroup::kMicrosoft, CdnGroup::kOthers};

const char* ToString(CdnGroup g);
std::optional<CdnGroup> ParseGroup(std::string_view name);

// ASN -> organization, and organization -> giant-CDN group.
class OrgMap {
 public:
  // CSV with header asn,org_id,org_name. Throws on a second, different
  // organization for an ASN.
  static OrgMap Load(const std::filesystem::path& asn_orgs,
                     const std::filesystem::path& org_groups);

  void AddAsn(Asn asn, const std::string& org_id, const std::string& org_name = "");
  void SetGroup(const std::string& org_id, CdnGroup group);

  const std::string* OrgOf(Asn asn) const;
  // Group of the organization announcing `asn`; Others when unknown.
  CdnGroup GroupOf(Asn asn) const;
  size_t asn_count() const { return asn_org_.size(); }

 private:
  std::map<Asn, std::string> asn_org_;
  std::map<std::string, std::string> org_name_;
  std::map<std::string, CdnGroup> org_group_;
};

struct AddressAttribution {
  IpAddress address;
  std::optional<Prefix> prefix;  // absent when unmapped
  std::vector<Asn> origins;
  CdnGroup group = CdnGroup::kOthers;
};

struct DomainAttribution {
  std::string domain;
  CdnGroup group = CdnGroup::kOthers;
  // Addresses pointed at more than one giant CDN.
  bool ambiguous = false;
  size_t mapped = 0;
  size_t unmapped = 0;
  std::vector<AddressAttribution> addresses;
};

// Each address votes for the giant-CDN group of its origin AS; the domain
// takes the group with most votes (ties by CdnGroup order), or Others when
// no address votes. Addresses announced by several origins vote for the
// first giant group among them in CdnGroup order.
DomainAttribution ClassifyDomain(const std::string& domain,
                                 const std::vector<IpAddress>& addresses,
                                 const PrefixTable& table, const OrgMap& orgs);

// domain,group,ambiguous,mapped,unmapped,addresses,origins. The last two
// hold one ';'-separated item per address; origins of one address are
// joined with '_' and left empty when unmapped.
const std::vector<std::string>& AttributionCsvHeader();
void WriteAttributionCsv(const std::filesystem::path& path,
                         const std::vector<DomainAttribution>& rows);
// domain -> group from an attribution CSV.
std::map<std::string, CdnGroup> ReadDomainGroups(const std::filesystem::path& path);

}  // namespace optperf::cdn

#endif  // OPTPERF_CDN_ATTRIBUTION_H_

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

#include "optperf/cdn/attribution.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "optperf/common/csv.h"

namespace optperf::cdn {

const char* ToString(CdnGroup g) {
  switch (g) {
    case CdnGroup::kAkamai: return "Akamai";
    case CdnGroup::kAmazon: return "Amazon";
    case CdnGroup::kCloudflare: return "Cloudflare";
    case CdnGroup::kGoogle: return "Google";
    case CdnGroup::kMicrosoft: return "Microsoft";
    case CdnGroup::kOthers: return "Others";
  }
  return "Others";
}

std::optional<CdnGroup> ParseGroup(std::string_view name) {
  for (CdnGroup g : kAllGroups) {
    std::string_view s = ToString(g);
    if (s.size() == name.size() &&
        std::equal(s.begin(), s.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) ==
                 std::tolower(static_cast<unsigned char>(b));
        })) {
      return g;
    }
  }
  return std::nullopt;
}

OrgMap OrgMap::Load(const std::filesystem::path& asn_orgs,
                    const std::filesystem::path& org_groups) {
  OrgMap m;
  const auto orgs = csv::Table::ReadFile(asn_orgs);
  for (size_t i = 0; i < orgs.size(); ++i) {
    const std::string& text = orgs.at(i, "asn");
    Asn asn = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), asn);
    if (ec != std::errc() || p != text.data() + text.size()) {
      throw csv::CsvError(asn_orgs.string() + ": bad ASN '" + text + "' on row " +
                          std::to_string(i + 2));
    }
    m.AddAsn(asn, orgs.at(i, "org_id"), orgs.get(i, "org_name").value_or(""));
  }
  const auto groups = csv::Table::ReadFile(org_groups);
  for (size_t i = 0; i < groups.size(); ++i) {
    const auto g = ParseGroup(groups.at(i, "group"));
    if (!g) {
      throw csv::CsvError(org_groups.string() + ": unknown group '" + groups.at(i, "group") +
                          "'");
    }
    m.SetGroup(groups.at(i, "org_id"), *g);
  }
  return m;
}

void OrgMap::AddAsn(Asn asn, const std::string& org_id, const std::string& org_name) {
  auto [it, inserted] = asn_org_.emplace(asn, org_id);
  if (!inserted && it->second != org_id) {
    throw std::invalid_argument("AS" + std::to_string(asn) + " mapped to both " + it->second +
                                " and " + org_id);
  }
  if (!org_name.empty()) org_name_[org_id] = org_name;
}

void OrgMap::SetGroup(const std::string& org_id, CdnGroup group) { org_group_[org_id] = group; }

const std::string* OrgMap::OrgOf(Asn asn) const {
  auto it = asn_org_.find(asn);
  return it == asn_org_.end() ? nullptr : &it->second;
}

CdnGroup OrgMap::GroupOf(Asn asn) const {
  const std::string* org = OrgOf(asn);
  if (!org) return CdnGroup::kOthers;
  auto it = org_group_.find(*org);
  return it == org_group_.end() ? CdnGroup::kOthers : it->second;
}

DomainAttribution ClassifyDomain(const std::string& domain,
                                 const std::vector<IpAddress>& addresses,
                                 const PrefixTable& table, const OrgMap& orgs) {
  DomainAttribution out;
  out.domain = domain;
  std::array<size_t, kAllGroups.size()> votes{};
  for (const auto& a : addresses) {
    AddressAttribution aa;
    aa.address = a;
    if (const PrefixEntry* e = table.Lookup(a)) {
      ++out.mapped;
      aa.prefix = e->prefix;
      aa.origins = e->origins;
      for (Asn asn : e->origins) aa.group = std::min(aa.group, orgs.GroupOf(asn));
    } else {
      ++out.unmapped;
    }
    if (aa.group != CdnGroup::kOthers) ++votes[static_cast<size_t>(aa.group)];
    out.addresses.push_back(std::move(aa));
  }
  size_t best = 0;
  size_t giants = 0;
  for (size_t g = 0; g + 1 < votes.size(); ++g) {
    if (votes[g] == 0) continue;
    ++giants;
    if (votes[g] > votes[best] || votes[best] == 0) best = g;
  }
  if (giants > 0) out.group = static_cast<CdnGroup>(best);
  out.ambiguous = giants > 1;
  return out;
}

const std::vector<std::string>& AttributionCsvHeader() {
  static const std::vector<std::string> h = {"domain",   "group",     "ambiguous", "mapped",
                                             "unmapped", "addresses", "origins"};
  return h;
}

void WriteAttributionCsv(const std::filesystem::path& path,
                         const std::vector<DomainAttribution>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& d : rows) {
    std::string addresses, origins;
    for (size_t i = 0; i < d.addresses.size(); ++i) {
      if (i > 0) {
        addresses += ';';
        origins += ';';
      }
      addresses += d.addresses[i].address.ToString();
      for (size_t j = 0; j < d.addresses[i].origins.size(); ++j) {
        if (j > 0) origins += '_';
        origins += std::to_string(d.addresses[i].origins[j]);
      }
    }
    out.push_back({d.domain, ToString(d.group), d.ambiguous ? "1" : "0", std::to_string(d.mapped),
                   std::to_string(d.unmapped), addresses, origins});
  }
  csv::WriteFile(path, AttributionCsvHeader(), out);
}

std::map<std::string, CdnGroup> ReadDomainGroups(const std::filesystem::path& path) {
  const auto t = csv::Table::ReadFile(path);
  std::map<std::string, CdnGroup> out;
  for (size_t i = 0; i < t.size(); ++i) {
    const auto g = ParseGroup(t.at(i, "group"));
    if (!g) {
      throw csv::CsvError(path.string() + ": unknown group '" + t.at(i, "group") + "' on row " +
                          std::to_string(i + 2));
    }
    out[t.at(i, "domain")] = *g;
  }
  return out;
}

}  // namespace optperf::cdn

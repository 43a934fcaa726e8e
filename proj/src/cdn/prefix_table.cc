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

#include "optperf/cdn/prefix_table.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>

namespace optperf::cdn {
namespace {

constexpr uint16_t kTableDumpV2 = 13;
constexpr uint16_t kPeerIndexTable = 1;
constexpr uint16_t kRibIpv4Unicast = 2;
constexpr uint16_t kRibIpv6Unicast = 4;
constexpr uint16_t kRibIpv4UnicastAddPath = 8;
constexpr uint16_t kRibIpv6UnicastAddPath = 10;
constexpr uint8_t kAttrAsPath = 2;
constexpr uint8_t kAsSet = 1;
constexpr uint8_t kAsSequence = 2;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool ParseUint(std::string_view s, T* out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> b) : b_(b) {}
  bool Has(size_t n) const { return pos_ + n <= b_.size(); }
  size_t remaining() const { return b_.size() - pos_; }
  uint8_t U8() { return b_[pos_++]; }
  uint16_t U16() {
    const uint16_t v = static_cast<uint16_t>(b_[pos_] << 8 | b_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  uint32_t U32() {
    const uint32_t v = uint32_t{b_[pos_]} << 24 | uint32_t{b_[pos_ + 1]} << 16 |
                       uint32_t{b_[pos_ + 2]} << 8 | b_[pos_ + 3];
    pos_ += 4;
    return v;
  }
  std::span<const uint8_t> Take(size_t n) {
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

// Origin ASNs of one AS_PATH attribute value (4-byte ASNs).
std::vector<Asn> OriginsOf(std::span<const uint8_t> path) {
  Reader r(path);
  std::vector<Asn> last;
  while (r.Has(2)) {
    const uint8_t type = r.U8();
    const uint8_t count = r.U8();
    if (!r.Has(size_t{count} * 4)) return {};
    std::vector<Asn> asns(count);
    for (auto& a : asns) a = r.U32();
    if (count == 0) continue;
    if (type == kAsSequence) {
      last = {asns.back()};
    } else if (type == kAsSet) {
      last = std::move(asns);
    }
    // Confederation segments never carry the origin.
  }
  return last;
}

// Parses one RIB_* record body into `table`. Returns false if malformed.
bool ParseRib(std::span<const uint8_t> body, IpFamily family, bool add_path,
              PrefixTable* table) {
  Reader r(body);
  if (!r.Has(5)) return false;
  r.U32();  // sequence number
  const uint8_t len = r.U8();
  const int max_len = family == IpFamily::kV4 ? 32 : 128;
  if (len > max_len) return false;
  const size_t nbytes = (len + 7) / 8;
  if (!r.Has(nbytes + 2)) return false;
  uint8_t raw[16] = {};
  auto pb = r.Take(nbytes);
  std::copy(pb.begin(), pb.end(), raw);
  const IpAddress addr =
      IpAddress::FromBytes(family, std::span<const uint8_t>(raw, family == IpFamily::kV4 ? 4 : 16));
  const uint16_t entries = r.U16();
  std::vector<Asn> origins;
  for (uint16_t i = 0; i < entries; ++i) {
    const size_t header = 2 + 4 + (add_path ? 4 : 0) + 2;
    if (!r.Has(header)) return false;
    r.U16();  // peer index
    r.U32();  // originated time
    if (add_path) r.U32();
    const uint16_t attr_len = r.U16();
    if (!r.Has(attr_len)) return false;
    Reader attrs(r.Take(attr_len));
    while (attrs.Has(3)) {
      const uint8_t flags = attrs.U8();
      const uint8_t type = attrs.U8();
      const bool extended = flags & 0x10;
      if (extended && !attrs.Has(2)) return false;
      const uint16_t alen = extended ? attrs.U16() : attrs.U8();
      if (!attrs.Has(alen)) return false;
      const auto value = attrs.Take(alen);
      if (type == kAttrAsPath) {
        const auto o = OriginsOf(value);
        origins.insert(origins.end(), o.begin(), o.end());
      }
    }
  }
  if (origins.empty()) return false;
  table->Add(Prefix::Of(addr, len), origins);
  return true;
}

}  // namespace

std::optional<Prefix> Prefix::Parse(std::string_view text) {
  const size_t slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  const auto addr = IpAddress::Parse(text.substr(0, slash));
  unsigned len = 0;
  if (!addr || !ParseUint(text.substr(slash + 1), &len) ||
      len > static_cast<unsigned>(addr->bit_length())) {
    return std::nullopt;
  }
  return Of(*addr, static_cast<uint8_t>(len));
}

Prefix Prefix::Of(const IpAddress& address, uint8_t length) {
  uint8_t raw[16] = {};
  const auto b = address.bytes();
  std::copy(b.begin(), b.end(), raw);
  for (int i = 0; i < static_cast<int>(b.size()); ++i) {
    const int keep = std::clamp(static_cast<int>(length) - i * 8, 0, 8);
    raw[i] &= static_cast<uint8_t>(0xff00 >> keep);
  }
  return Prefix{IpAddress::FromBytes(address.family(), std::span<const uint8_t>(raw, b.size())),
                length};
}

bool Prefix::Contains(const IpAddress& a) const {
  if (a.family() != address.family()) return false;
  for (int i = 0; i < length; ++i) {
    if (a.bit(i) != address.bit(i)) return false;
  }
  return true;
}

std::string Prefix::ToString() const {
  return address.ToString() + "/" + std::to_string(length);
}

PrefixTable::PrefixTable() : v4_(1), v6_(1) {}

void PrefixTable::Add(const Prefix& prefix, std::span<const Asn> origins) {
  auto& nodes = trie(prefix.address.family());
  int32_t n = 0;
  for (int i = 0; i < prefix.length; ++i) {
    const int b = prefix.address.bit(i);
    if (nodes[n].child[b] < 0) {
      nodes[n].child[b] = static_cast<int32_t>(nodes.size());
      nodes.emplace_back();
    }
    n = nodes[n].child[b];
  }
  if (nodes[n].entry < 0) {
    nodes[n].entry = static_cast<int32_t>(entries_.size());
    entries_.push_back(PrefixEntry{prefix, {}});
  }
  auto& o = entries_[nodes[n].entry].origins;
  o.insert(o.end(), origins.begin(), origins.end());
  std::sort(o.begin(), o.end());
  o.erase(std::unique(o.begin(), o.end()), o.end());
}

const PrefixEntry* PrefixTable::Lookup(const IpAddress& address) const {
  const auto& nodes = trie(address.family());
  int32_t n = 0;
  int32_t best = nodes[0].entry;
  for (int i = 0; i < address.bit_length(); ++i) {
    n = nodes[n].child[address.bit(i)];
    if (n < 0) break;
    if (nodes[n].entry >= 0) best = nodes[n].entry;
  }
  return best < 0 ? nullptr : &entries_[best];
}

PrefixTable ParsePrefix2As(std::string_view text) {
  PrefixTable table;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = Trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    ++table.stats.records;

    std::vector<std::string_view> cols;
    size_t start = 0;
    while (start <= line.size()) {
      size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) tab = line.size();
      cols.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    unsigned len = 0;
    const auto addr = cols.size() == 3 ? IpAddress::Parse(Trim(cols[0])) : std::nullopt;
    if (!addr || !ParseUint(Trim(cols[1]), &len) ||
        len > static_cast<unsigned>(addr->bit_length())) {
      ++table.stats.skipped;
      continue;
    }
    std::vector<Asn> origins;
    bool ok = true;
    std::string_view asns = Trim(cols[2]);
    size_t s = 0;
    while (s <= asns.size()) {
      size_t sep = asns.find_first_of("_,", s);
      if (sep == std::string_view::npos) sep = asns.size();
      Asn a = 0;
      if (!ParseUint(asns.substr(s, sep - s), &a)) {
        ok = false;
        break;
      }
      origins.push_back(a);
      s = sep + 1;
    }
    if (!ok) {
      ++table.stats.skipped;
      continue;
    }
    table.Add(Prefix::Of(*addr, static_cast<uint8_t>(len)), origins);
  }
  return table;
}

PrefixTable ParseMrt(std::span<const uint8_t> bytes) {
  PrefixTable table;
  Reader r(bytes);
  while (r.remaining() > 0) {
    if (!r.Has(12)) {
      ++table.stats.skipped;
      break;
    }
    r.U32();  // timestamp
    const uint16_t type = r.U16();
    const uint16_t subtype = r.U16();
    const uint32_t length = r.U32();
    if (!r.Has(length)) {
      ++table.stats.skipped;
      break;
    }
    const auto body = r.Take(length);
    if (type != kTableDumpV2 || subtype == kPeerIndexTable) continue;
    ++table.stats.records;
    bool ok = false;
    switch (subtype) {
      case kRibIpv4Unicast: ok = ParseRib(body, IpFamily::kV4, false, &table); break;
      case kRibIpv6Unicast: ok = ParseRib(body, IpFamily::kV6, false, &table); break;
      case kRibIpv4UnicastAddPath: ok = ParseRib(body, IpFamily::kV4, true, &table); break;
      case kRibIpv6UnicastAddPath: ok = ParseRib(body, IpFamily::kV6, true, &table); break;
      default: break;  // multicast and generic RIBs carry nothing we use
    }
    if (!ok) ++table.stats.skipped;
  }
  return table;
}

PrefixTable LoadPrefixTable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PrefixTableError("cannot open prefix table " + path.string());
  const std::vector<uint8_t> data{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  // An MRT record header starts with a 4-byte timestamp followed by a
  // type field; text files have printable bytes there.
  const bool mrt = data.size() >= 12 && data[4] == 0 && data[5] == kTableDumpV2;
  PrefixTable table =
      mrt ? ParseMrt(data)
          : ParsePrefix2As(std::string_view(reinterpret_cast<const char*>(data.data()),
                                            data.size()));
  if (table.empty()) {
    throw PrefixTableError("no prefixes loaded from " + path.string() + " (" +
                           std::to_string(table.stats.skipped) + " unparseable records)");
  }
  return table;
}

}  // namespace optperf::cdn

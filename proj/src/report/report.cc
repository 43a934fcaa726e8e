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

#include "optperf/report/report.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <tuple>

#include "optperf/common/csv.h"

namespace optperf::report {
namespace {

using RunKey = std::tuple<std::string, std::string, std::string>;  // vp, domain, run

RunKey KeyOf(const std::string& vp, const std::string& domain, const std::string& run) {
  return {vp, domain, run};
}

const std::set<std::string>& TcpMatrixConfigs() {
  static const std::set<std::string> kSet = {"BL", "ECN", "SACK", "WS", "ALL"};
  return kSet;
}

// Rounds count/n (in tenths of a percent) so that the results add up to
// exactly 1000 tenths.
template <size_t N>
std::array<double, N> LargestRemainder(const std::array<size_t, N>& counts, size_t n) {
  std::array<double, N> out{};
  if (n == 0) return out;
  std::array<uint64_t, N> units{};
  std::array<uint64_t, N> rem{};
  uint64_t assigned = 0;
  for (size_t i = 0; i < N; ++i) {
    units[i] = counts[i] * 1000 / n;
    rem[i] = counts[i] * 1000 % n;
    assigned += units[i];
  }
  std::array<size_t, N> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return rem[a] > rem[b]; });
  for (size_t k = 0; assigned < 1000 && k < N; ++k, ++assigned) ++units[order[k]];
  for (size_t i = 0; i < N; ++i) out[i] = static_cast<double>(units[i]) / 10.0;
  return out;
}

std::string DisplayConfig(const std::string& c) {
  if (c == "WARMUP") return "Warm-up";
  if (c == "ALL") return "All";
  if (IsQuicConfig(c)) return c.substr(5);
  return c;
}

std::string DisplayVs(const SpeedUpPair& p) {
  if (IsQuicConfig(p.config) && !IsQuicConfig(p.vs)) return "TCP-" + p.vs;
  return DisplayConfig(p.vs);
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void Close(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string Percent(double v) { return fmt::format("{:.1f}", v); }

}  // namespace

bool IsQuicConfig(const std::string& config) { return config.rfind("QUIC:", 0) == 0; }

std::string FileSafe(const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) c = '-';
  }
  return s;
}

size_t SpeedUpResult::total_skipped() const {
  size_t n = 0;
  for (const auto& [k, v] : skipped) n += v;
  return n;
}

std::vector<SpeedUpPair> DefaultPairs(const std::vector<std::string>& configs_present) {
  const std::set<std::string> present(configs_present.begin(), configs_present.end());
  std::vector<SpeedUpPair> out;
  for (const char* c : {"WARMUP", "ECN", "SACK", "WS", "ALL"}) {
    if (present.count(c) || present.count("BL")) out.push_back({c, "BL"});
  }
  std::vector<std::string> quic;
  for (const auto& c : present) {
    if (IsQuicConfig(c)) quic.push_back(c);
  }
  for (size_t j = 0; j < quic.size(); ++j) {
    for (size_t i = 0; i < j; ++i) out.push_back({quic[j], quic[i]});
  }
  for (const auto& q : quic) {
    out.push_back({q, "BL"});
    out.push_back({q, "ALL"});
  }
  return out;
}

std::string PairLabel(const SpeedUpPair& p) { return p.config + "|" + p.vs; }

SpeedUpResult ComputeSpeedUps(const std::vector<IndicatorRecord>& records,
                              const std::vector<SpeedUpPair>& pairs) {
  std::map<RunKey, std::map<std::string, double>> runs;
  for (const auto& r : records) {
    runs[KeyOf(r.vantage_point, r.domain, r.run_id)][r.config] = r.indicators.mean_throughput_bps;
  }
  SpeedUpResult out;
  for (const auto& pair : pairs) {
    size_t& skipped = out.skipped[PairLabel(pair)];
    for (const auto& [key, configs] : runs) {
      auto a = configs.find(pair.config);
      auto b = configs.find(pair.vs);
      if (a == configs.end() && b == configs.end()) continue;  // pair not in this run
      if (a == configs.end() || b == configs.end() || a->second <= 0 || b->second <= 0) {
        ++skipped;
        continue;
      }
      out.speedups.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), pair.config,
                              pair.vs, a->second / b->second});
    }
  }
  return out;
}

size_t BucketIndex(double ratio) {
  return static_cast<size_t>(std::upper_bound(kBucketEdges.begin(), kBucketEdges.end(), ratio) -
                             kBucketEdges.begin());
}

std::string BucketLabel(size_t index) {
  if (index == 0) return fmt::format("<{}", kBucketEdges[0]);
  if (index == kBucketCount - 1) return fmt::format(">={}", kBucketEdges.back());
  return fmt::format("{}-{}", kBucketEdges[index - 1], kBucketEdges[index]);
}

double BucketRow::plus_share() const { return samples ? 100.0 * plus / samples : 0.0; }
double BucketRow::minus_share() const { return samples ? 100.0 * minus / samples : 0.0; }
double BucketRow::bucket_share(size_t i) const {
  return samples ? 100.0 * counts[i] / samples : 0.0;
}

std::array<double, 2> BucketRow::rounded_plus_minus() const {
  return LargestRemainder<2>({plus, minus}, samples);
}

std::array<double, kBucketCount> BucketRow::rounded_buckets() const {
  return LargestRemainder<kBucketCount>(counts, samples);
}

std::vector<BucketRow> Bucketize(const std::vector<SpeedUp>& speedups,
                                 const std::vector<SpeedUpPair>& pairs) {
  std::vector<BucketRow> rows;
  for (const auto& p : pairs) rows.push_back(BucketRow{p});
  for (const auto& s : speedups) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const BucketRow& r) {
      return r.pair.config == s.config && r.pair.vs == s.vs;
    });
    if (it == rows.end()) continue;
    ++it->samples;
    ++(s.ratio > 1.0 ? it->plus : it->minus);
    ++it->counts[BucketIndex(s.ratio)];
  }
  return rows;
}

std::vector<CdfPoint> CdfSeries(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const size_t n = values.size();
  for (size_t i = 0; i < n; ++i) {
    if (i + 1 < n && values[i + 1] == values[i]) continue;
    out.push_back({values[i], metrics::RoundedRatio(i + 1, n)});
  }
  return out;
}

std::map<std::string, std::vector<double>> CdfGroups(
    const std::vector<IndicatorRecord>& records,
    const std::map<std::string, cdn::CdnGroup>& domain_groups) {
  std::map<std::string, std::vector<double>> g;
  for (const auto& r : records) {
    const double mbps = r.indicators.mean_throughput_bps / 1e6;
    const std::string vp = FileSafe(r.vantage_point.empty() ? "default" : r.vantage_point);
    const std::string cfg = FileSafe(r.config);
    if (mbps > 0) {
      g["config-" + cfg].push_back(mbps);
      g["config-" + cfg + "-vp-" + vp].push_back(mbps);
    }
    if (r.config == "WARMUP") continue;
    if (mbps > 0) {
      auto it = domain_groups.find(r.domain);
      const std::string cdn =
          cdn::ToString(it == domain_groups.end() ? cdn::CdnGroup::kOthers : it->second);
      g["vp-" + vp].push_back(mbps);
      g["cdn-" + cdn].push_back(mbps);
      g["cdn-" + cdn + "-vp-" + vp].push_back(mbps);
    }
    if (r.indicators.mean_rtt_ms && *r.indicators.mean_rtt_ms > 0) {
      g["rtt-vp-" + vp].push_back(*r.indicators.mean_rtt_ms);
    }
  }
  return g;
}

const std::vector<std::string>& FailureCsvHeader() {
  static const std::vector<std::string> kHeader = {"config",  "domain", "target_ip",
                                                   "vantage_point", "run_id", "outcome",
                                                   "reason",  "capture"};
  return kHeader;
}

std::vector<FailureRecord> ReadFailureCsv(const std::filesystem::path& path) {
  const auto t = csv::Table::ReadFile(path);
  std::vector<FailureRecord> out;
  for (size_t i = 0; i < t.size(); ++i) {
    out.push_back({t.at(i, "config"), t.at(i, "domain"), t.at(i, "target_ip"),
                   t.at(i, "vantage_point"), t.at(i, "run_id"), t.at(i, "outcome"),
                   t.get(i, "reason").value_or(""), t.get(i, "capture").value_or("")});
  }
  return out;
}

void WriteFailureCsv(const std::filesystem::path& path, const std::vector<FailureRecord>& rows) {
  auto out = OpenOut(path);
  csv::WriteRow(out, FailureCsvHeader());
  for (const auto& f : rows) {
    csv::WriteRow(out, {f.config, f.domain, f.target_ip, f.vantage_point, f.run_id, f.outcome,
                        f.reason, f.capture});
  }
  Close(out, path);
}

std::vector<CountRow> CountSuccesses(const std::vector<IndicatorRecord>& records,
                                     const std::vector<FailureRecord>& failures,
                                     const std::map<std::string, cdn::CdnGroup>& domain_groups) {
  struct RunState {
    bool tcp_attempted = false;
    bool tcp_failed = false;
    bool quic_ok = false;
  };
  std::map<RunKey, RunState> runs;
  std::set<std::string> vps;
  auto is_tcp = [](const std::string& c) { return TcpMatrixConfigs().count(c) > 0; };
  for (const auto& r : records) {
    auto& s = runs[KeyOf(r.vantage_point, r.domain, r.run_id)];
    vps.insert(r.vantage_point);
    if (is_tcp(r.config)) s.tcp_attempted = true;
    if (IsQuicConfig(r.config)) s.quic_ok = true;
  }
  for (const auto& f : failures) {
    auto& s = runs[KeyOf(f.vantage_point, f.domain, f.run_id)];
    vps.insert(f.vantage_point);
    if (is_tcp(f.config)) s.tcp_attempted = s.tcp_failed = true;
  }
  std::map<std::string, std::set<std::string>> tcp_ok;  // vp -> domains
  std::map<std::string, std::set<std::string>> quic_ok;
  for (const auto& [key, s] : runs) {
    const auto& [vp, domain, run] = key;
    if (s.tcp_attempted && !s.tcp_failed) tcp_ok[vp].insert(domain);
    if (s.quic_ok) quic_ok[vp].insert(domain);
  }
  std::vector<CountRow> rows;
  auto add = [&](const std::string& section, const std::string& label,
                 const std::set<std::string>& domains) {
    CountRow row{section, label};
    for (const auto& d : domains) {
      auto it = domain_groups.find(d);
      const auto g = it == domain_groups.end() ? cdn::CdnGroup::kOthers : it->second;
      ++row.per_group[static_cast<size_t>(g)];
      ++row.total;
    }
    rows.push_back(row);
  };
  for (const auto& vp : vps) add("TCP", vp, tcp_ok[vp]);
  for (const auto& vp : vps) add("QUIC", vp + "_Q", quic_ok[vp]);
  return rows;
}

ReportSummary RenderOutputs(const ReportInputs& in, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::string> configs;
  for (const auto& r : in.records) configs.push_back(r.config);
  for (const auto& f : in.failures) configs.push_back(f.config);
  const std::vector<SpeedUpPair> pairs = in.pairs.empty() ? DefaultPairs(configs) : in.pairs;
  const SpeedUpResult su = ComputeSpeedUps(in.records, pairs);
  const auto rows = Bucketize(su.speedups, pairs);
  ReportSummary summary{su.speedups.size(), su.total_skipped(), {}};

  // buckets.csv
  {
    const auto path = out_dir / "buckets.csv";
    auto out = OpenOut(path);
    std::vector<std::string> header = {"config", "vs", "plus", "minus"};
    for (size_t i = 0; i < kBucketCount; ++i) header.push_back(BucketLabel(i));
    csv::WriteRow(out, header);
    for (const auto& r : rows) {
      std::vector<std::string> f = {r.pair.config, r.pair.vs};
      if (r.samples == 0) {
        f.resize(2 + 2 + kBucketCount, "n/a");
      } else {
        for (double v : r.rounded_plus_minus()) f.push_back(Percent(v));
        for (double v : r.rounded_buckets()) f.push_back(Percent(v));
      }
      csv::WriteRow(out, f);
    }
    Close(out, path);
  }

  // speedups.csv
  {
    const auto path = out_dir / "speedups.csv";
    auto out = OpenOut(path);
    csv::WriteRow(out, {"vantage_point", "domain", "run_id", "config", "vs", "ratio"});
    for (const auto& s : su.speedups) {
      csv::WriteRow(out, {s.vantage_point, s.domain, s.run_id, s.config, s.vs,
                          metrics::FormatDouble(s.ratio)});
    }
    Close(out, path);
  }

  // counts.csv
  const auto counts = CountSuccesses(in.records, in.failures, in.domain_groups);
  {
    const auto path = out_dir / "counts.csv";
    auto out = OpenOut(path);
    std::vector<std::string> header = {"section", "vantage_point", "Total"};
    for (auto g : cdn::kAllGroups) header.push_back(cdn::ToString(g));
    csv::WriteRow(out, header);
    for (const auto& c : counts) {
      std::vector<std::string> f = {c.section, c.label, std::to_string(c.total)};
      for (size_t n : c.per_group) f.push_back(std::to_string(n));
      csv::WriteRow(out, f);
    }
    Close(out, path);
  }

  // cdf_<group>.csv
  std::vector<std::string> omitted;
  for (const auto& [group, values] : CdfGroups(in.records, in.domain_groups)) {
    if (values.empty()) {
      omitted.push_back(group);
      continue;
    }
    const std::string name = "cdf_" + group + ".csv";
    const auto path = out_dir / name;
    auto out = OpenOut(path);
    csv::WriteRow(out, {group.rfind("rtt-", 0) == 0 ? "rtt_ms" : "throughput_mbps", "cdf"});
    for (const auto& p : CdfSeries(values)) {
      csv::WriteRow(out, {metrics::FormatDouble(p.x), metrics::FormatDouble(p.y)});
    }
    Close(out, path);
    summary.cdf_files.push_back(name);
  }

  // report.txt
  {
    const auto path = out_dir / "report.txt";
    auto out = OpenOut(path);
    out << fmt::format("{} indicator rows, {} failed downloads\n\n", in.records.size(),
                       in.failures.size());
    out << "Speed-ups (share of runs per bucket)\n";
    std::string line = fmt::format("{:<10} {:<10} {:>5}", "Config", "vs.", "n");
    line += fmt::format(" {:>6} {:>6}", "+", "-");
    for (size_t i = 0; i < kBucketCount; ++i) line += fmt::format(" {:>8}", BucketLabel(i));
    out << line << '\n';
    for (const auto& r : rows) {
      line = fmt::format("{:<10} {:<10} {:>5}", DisplayConfig(r.pair.config), DisplayVs(r.pair),
                         r.samples);
      if (r.samples == 0) {
        line += "  n/a";
      } else {
        const auto pm = r.rounded_plus_minus();
        line += fmt::format(" {:>5}% {:>5}%", Percent(pm[0]), Percent(pm[1]));
        for (double v : r.rounded_buckets()) line += fmt::format(" {:>7}%", Percent(v));
      }
      out << line << '\n';
    }
    out << fmt::format("skipped comparisons (a side without indicators): {}\n",
                       su.total_skipped());
    for (const auto& [label, n] : su.skipped) {
      if (n) out << fmt::format("  {}: {}\n", label, n);
    }

    out << "\nDomains with successful downloads\n";
    line = fmt::format("{:<12} {:>6}", "Run", "Total");
    for (auto g : cdn::kAllGroups) line += fmt::format(" {:>10}", cdn::ToString(g));
    out << line << '\n';
    std::string section;
    for (const auto& c : counts) {
      if (c.section != section) {
        section = c.section;
        out << "  " << section << '\n';
      }
      line = fmt::format("{:<12} {:>6}", c.label, c.total);
      for (size_t n : c.per_group) line += fmt::format(" {:>10}", n);
      out << line << '\n';
    }

    out << "\nCDF series\n";
    for (const auto& f : summary.cdf_files) out << "  " << f << '\n';
    for (const auto& g : omitted) out << "  (empty, omitted) " << g << '\n';
    Close(out, path);
  }
  return summary;
}

}  // namespace optperf::report

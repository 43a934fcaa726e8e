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

#ifndef OPTPERF_REPORT_REPORT_H_
#define OPTPERF_REPORT_REPORT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optperf/cdn/attribution.h"
#include "optperf/metrics/indicator_record.h"

namespace optperf::report {

using metrics::IndicatorRecord;

struct SpeedUpPair {
  std::string config;
  std::string vs;
  friend bool operator==(const SpeedUpPair&, const SpeedUpPair&) = default;
};

struct SpeedUp {
  std::string vantage_point;
  std::string domain;
  std::string run_id;
  std::string config;
  std::string vs;
  double ratio = 0;
};

struct SpeedUpResult {
  std::vector<SpeedUp> speedups;
  // Per pair: runs in which one or both sides had no successful download.
  std::map<std::string, size_t> skipped;
  size_t total_skipped() const;
};

// Warm-up, ECN, SACK, WS and ALL against BL; then for each QUIC client id
// present (sorted) every later client against every earlier one, and each
// client against BL and ALL.
std::vector<SpeedUpPair> DefaultPairs(const std::vector<std::string>& configs_present);
std::string PairLabel(const SpeedUpPair& p);

// A run is identified by (vantage point, domain, run id). Throughput is
// mean_throughput_bps.
SpeedUpResult ComputeSpeedUps(const std::vector<IndicatorRecord>& records,
                              const std::vector<SpeedUpPair>& pairs);

// Lower edges of the fine buckets after "<0.7".
inline constexpr std::array<double, 9> kBucketEdges = {0.7, 0.8, 0.9, 1.0, 1.1,
                                                       1.2, 1.3, 1.5, 2.0};
inline constexpr size_t kBucketCount = kBucketEdges.size() + 1;

// 0 for ratio < 0.7, i for kBucketEdges[i-1] <= ratio < kBucketEdges[i],
// kBucketCount-1 for ratio >= 2.0.
size_t BucketIndex(double ratio);
std::string BucketLabel(size_t index);

struct BucketRow {
  SpeedUpPair pair;
  size_t samples = 0;
  size_t plus = 0;   // ratio > 1.0
  size_t minus = 0;  // ratio <= 1.0
  std::array<size_t, kBucketCount> counts{};

  // Exact shares in percent; NaN-free, zero when there are no samples.
  double plus_share() const;
  double minus_share() const;
  double bucket_share(size_t i) const;
  // The same shares rounded to one decimal so that plus+minus and the
  // buckets each add up to exactly 100.0 (largest remainder).
  std::array<double, 2> rounded_plus_minus() const;
  std::array<double, kBucketCount> rounded_buckets() const;
};

std::vector<BucketRow> Bucketize(const std::vector<SpeedUp>& speedups,
                                 const std::vector<SpeedUpPair>& pairs);

struct CdfPoint {
  double x = 0;
  double y = 0;
  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

// Empirical CDF with equal values collapsed onto their highest rank.
std::vector<CdfPoint> CdfSeries(std::vector<double> values);

// Grouped values for plotting, keyed by a file-safe group name.
std::map<std::string, std::vector<double>> CdfGroups(
    const std::vector<IndicatorRecord>& records,
    const std::map<std::string, cdn::CdnGroup>& domain_groups);

// One download that did not produce an indicator row.
struct FailureRecord {
  std::string config;
  std::string domain;
  std::string target_ip;
  std::string vantage_point;
  std::string run_id;
  std::string outcome;
  std::string reason;
  std::string capture;
};

const std::vector<std::string>& FailureCsvHeader();
std::vector<FailureRecord> ReadFailureCsv(const std::filesystem::path& path);
void WriteFailureCsv(const std::filesystem::path& path, const std::vector<FailureRecord>& rows);

struct CountRow {
  std::string section;  // "TCP" or "QUIC"
  std::string label;    // vantage point, with "_Q" for QUIC rows
  size_t total = 0;
  std::array<size_t, cdn::kAllGroups.size()> per_group{};
};

// Domains with successful downloads per vantage point and CDN group. TCP:
// some run in which every non-warm-up TCP download produced indicators.
// QUIC: some run with at least one QUIC download producing indicators.
std::vector<CountRow> CountSuccesses(const std::vector<IndicatorRecord>& records,
                                     const std::vector<FailureRecord>& failures,
                                     const std::map<std::string, cdn::CdnGroup>& domain_groups);

struct ReportInputs {
  std::vector<IndicatorRecord> records;
  std::vector<FailureRecord> failures;
  std::map<std::string, cdn::CdnGroup> domain_groups;
  std::vector<SpeedUpPair> pairs;  // empty: DefaultPairs
};

struct ReportSummary {
  size_t speedups = 0;
  size_t skipped = 0;
  std::vector<std::string> cdf_files;
};

// Writes buckets.csv, speedups.csv, counts.csv, cdf_<group>.csv and
// report.txt into `out_dir`. Throws std::runtime_error when a file cannot
// be written.
ReportSummary RenderOutputs(const ReportInputs& in, const std::filesystem::path& out_dir);

bool IsQuicConfig(const std::string& config);
std::string FileSafe(const std::string& name);

}  // namespace optperf::report

#endif  // OPTPERF_REPORT_REPORT_H_

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

#ifndef OPTPERF_CLI_CONFIG_H_
#define OPTPERF_CLI_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace optperf::cli {

// Invalid configuration; the CLI exits with status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Stage input/output failure; the CLI exits with status 1.
class StageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage { kScan, kCrawl, kDownload, kAnalyze, kAttribute, kReport };
const char* ToString(Stage s);
bool TouchesNetwork(Stage s);

struct PipelineConfig {
  // Paths.
  std::string domains;  // newline-separated domain list
  std::filesystem::path out_dir = "optperf-out";
  std::string prefix_table;
  std::string asn_orgs;
  std::string org_groups;
  std::string hosts_file;
  bool hosts_only = false;
  std::string ca_file;
  // analyze: a directory of captures instead of the download manifest.
  std::string captures_dir;

  std::string vantage_point = "local";
  std::string user_agent;

  // Crawl limits.
  int crawl_depth = 3;
  int crawl_pages = 200;
  uint64_t min_size = 1'000'000;
  uint64_t probe_slack = 256 * 1024;
  int crawl_concurrency = 8;
  int request_gap_ms = 0;

  // Download matrix.
  std::string matrix;  // empty: default matrix plus every QUIC client
  std::vector<std::string> quic_clients;  // id=command template
  int runs = 1;
  int gap_ms = 1000;
  int linger_ms = 500;
  int connect_timeout_s = 10;
  int download_timeout_s = 300;
  std::string capture_interface;

  // Scanner.
  int scan_port = 443;
  double scan_rate = 100;
  int scan_in_flight = 64;
  int scan_timeout_ms = 3000;
  std::string termination = "rst";
  std::string scan_interface;

  bool authorized = false;
  bool dry_run = false;
  bool fixed_clock = false;
};

// Throws ConfigError unless the files `stage` reads exist, the output
// directory is writable and every value is in range. Network stages also
// need `authorized` unless this is a dry run. With `chained`, files that an
// earlier stage of the same pipeline invocation writes are not checked.
void Validate(const PipelineConfig& c, Stage stage, bool chained = false);

std::string DefaultUserAgent();

// Stage artifacts, all inside out_dir.
namespace files {
inline constexpr const char* kScanResults = "scan.csv";
inline constexpr const char* kDeployment = "deployment.json";
inline constexpr const char* kTargets = "targets.csv";
inline constexpr const char* kCrawlReport = "crawl_report.csv";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kCaptures = "captures";
inline constexpr const char* kMetrics = "metrics.csv";
inline constexpr const char* kMetricsJson = "metrics.jsonl";
inline constexpr const char* kFailures = "failures.csv";
inline constexpr const char* kAttribution = "attribution.csv";
inline constexpr const char* kReportDir = "report";
}  // namespace files

}  // namespace optperf::cli

#endif  // OPTPERF_CLI_CONFIG_H_

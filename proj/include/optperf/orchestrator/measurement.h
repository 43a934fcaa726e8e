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

#ifndef OPTPERF_ORCHESTRATOR_MEASUREMENT_H_
#define OPTPERF_ORCHESTRATOR_MEASUREMENT_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "optperf/crawler/crawl_target.h"
#include "optperf/net/http_client.h"
#include "optperf/net/resolver.h"
#include "optperf/orchestrator/download.h"
#include "optperf/orchestrator/option_config.h"

namespace optperf::orchestrator {

struct RunEntry {
  std::string config;
  std::string resolved_ip;
  int64_t resolved_at_us = 0;
  std::string capture;  // path relative to the manifest directory
  int64_t start_us = 0;
  int64_t end_us = 0;
  Outcome outcome = Outcome::kOk;
  std::string reason;
  int http_status = 0;
  uint64_t bytes = 0;
  uint64_t capture_packets = 0;
  uint64_t capture_drops = 0;
  // Host TCP settings that were in force, e.g. "ecn=1 sack=0 ws=1".
  std::string host_settings;
};

struct MeasurementRun {
  std::string run_id;
  std::string domain;
  std::string url;
  std::string vantage_point;
  std::vector<RunEntry> entries;
};

struct OrchestratorOptions {
  std::vector<OptionConfig> matrix = DefaultMatrix();
  std::map<std::string, QuicAdapter> quic_adapters;
  std::string vantage_point = "local";
  net::FetchOptions fetch;
  std::chrono::milliseconds gap{1000};
  // Time the capture keeps running after a download to see the teardown.
  std::chrono::milliseconds capture_linger{500};
  std::filesystem::path capture_dir = "captures";
  // Empty captures on every interface.
  std::string capture_interface;
  // Off only for dry runs and tests that cannot change host settings.
  bool configure_host = true;
  bool capture = true;
};

// Microseconds since the Unix epoch.
using WallClock = std::function<int64_t()>;
int64_t SystemWallClockUs();

class Orchestrator {
 public:
  // Throws MatrixError if the matrix is malformed or names an unregistered
  // QUIC client.
  Orchestrator(OrchestratorOptions options, std::shared_ptr<net::Resolver> resolver,
               WallClock clock = SystemWallClockUs);

  // run_measurement: every matrix entry in order, with a fresh resolution,
  // host configuration, capture and download each. Entry failures are
  // recorded, not thrown. Throws CaptureUnavailable or SysctlError when the
  // host cannot capture or be configured at all.
  MeasurementRun Run(const crawler::CrawlTarget& target, const std::string& run_id);

  const OrchestratorOptions& options() const { return options_; }

 private:
  RunEntry RunOne(const OptionConfig& config, const net::Url& url, const std::string& domain,
                  const std::string& run_id);

  OrchestratorOptions options_;
  std::shared_ptr<net::Resolver> resolver_;
  WallClock clock_;
};

// Manifest: JSON object {"version":1,"runs":[...]} with capture paths
// relative to the manifest file.
void WriteManifest(const std::filesystem::path& path, const std::vector<MeasurementRun>& runs);
std::vector<MeasurementRun> ReadManifest(const std::filesystem::path& path);

std::string CaptureFileName(const std::string& run_id, const std::string& domain,
                            const std::string& config);

}  // namespace optperf::orchestrator

#endif  // OPTPERF_ORCHESTRATOR_MEASUREMENT_H_

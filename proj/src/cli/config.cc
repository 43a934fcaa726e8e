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

#include "optperf/cli/config.h"

#include <fstream>
#include <set>

#include <fmt/core.h>

#include "optperf/orchestrator/download.h"
#include "optperf/orchestrator/option_config.h"

namespace optperf::cli {

const char* ToString(Stage s) {
  switch (s) {
    case Stage::kScan: return "scan";
    case Stage::kCrawl: return "crawl";
    case Stage::kDownload: return "download";
    case Stage::kAnalyze: return "analyze";
    case Stage::kAttribute: return "attribute";
    case Stage::kReport: return "report";
  }
  return "?";
}

bool TouchesNetwork(Stage s) {
  return s == Stage::kScan || s == Stage::kCrawl || s == Stage::kDownload;
}

std::string DefaultUserAgent() {
  return "optperf-research/" OPTPERF_VERSION " (transport option measurement)";
}

namespace {

void RequireFile(const std::string& key, const std::filesystem::path& p) {
  if (p.empty()) throw ConfigError(key + " is required");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) {
    throw ConfigError(fmt::format("{}: '{}' is not a readable file", key, p.string()));
  }
}

void RequireOptionalFile(const std::string& key, const std::string& p) {
  if (!p.empty()) RequireFile(key, p);
}

void RequirePositive(const std::string& key, double v) {
  if (!(v > 0)) throw ConfigError(fmt::format("{} must be positive, got {}", key, v));
}

void RequireWritableDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("out_dir: cannot create '{}': {}", dir.string(), ec.message()));
  const auto probe = dir / ".optperf_write_test";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError(fmt::format("out_dir: '{}' is not writable", dir.string()));
  }
  std::filesystem::remove(probe, ec);
}

void ValidateMatrix(const PipelineConfig& c) {
  std::set<std::string> ids;
  for (const auto& spec : c.quic_clients) {
    try {
      ids.insert(orchestrator::ParseQuicAdapter(spec).id);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("quic_client '{}': {}", spec, e.what()));
    }
  }
  if (c.matrix.empty()) return;
  try {
    const auto m = orchestrator::ParseMatrix(c.matrix);
    orchestrator::ValidateMatrix(m);
    for (const auto& cfg : m) {
      if (cfg.is_quic() && !ids.contains(cfg.quic_client())) {
        throw ConfigError(fmt::format("matrix: no quic_client registered for {}", cfg.name));
      }
    }
  } catch (const orchestrator::MatrixError& e) {
    throw ConfigError(fmt::format("matrix: {}", e.what()));
  }
}

}  // namespace

void Validate(const PipelineConfig& c, Stage stage, bool chained) {
  if (TouchesNetwork(stage) && !c.authorized && !c.dry_run) {
    throw ConfigError(fmt::format(
        "{} sends traffic to the listed hosts; pass --i-have-authorization (or set "
        "i_have_authorization=true) once you are allowed to measure them, or use --dry-run",
        ToString(stage)));
  }
  if (c.out_dir.empty()) throw ConfigError("out_dir is required");
  RequireOptionalFile("hosts_file", c.hosts_file);
  RequireOptionalFile("ca_file", c.ca_file);
  if (c.hosts_only && c.hosts_file.empty()) throw ConfigError("hosts_only needs hosts_file");
  if (c.vantage_point.empty()) throw ConfigError("vantage_point must not be empty");
  const auto produced = [&](const char* name) {
    if (!chained) RequireFile(name, c.out_dir / name);
  };
  switch (stage) {
    case Stage::kScan:
      RequireFile("domains", c.domains);
      if (c.scan_port < 1 || c.scan_port > 65535) throw ConfigError("scan_port out of range");
      RequirePositive("scan_rate", c.scan_rate);
      RequirePositive("scan_in_flight", c.scan_in_flight);
      RequirePositive("scan_timeout_ms", c.scan_timeout_ms);
      if (c.termination != "rst" && c.termination != "fin") {
        throw ConfigError("termination must be rst or fin");
      }
      break;
    case Stage::kCrawl:
      RequireFile("domains", c.domains);
      if (c.crawl_depth < 0) throw ConfigError("crawl_depth must not be negative");
      RequirePositive("crawl_pages", c.crawl_pages);
      RequirePositive("min_size", static_cast<double>(c.min_size));
      RequirePositive("crawl_concurrency", c.crawl_concurrency);
      if (c.request_gap_ms < 0) throw ConfigError("request_gap_ms must not be negative");
      break;
    case Stage::kDownload:
      produced(files::kTargets);
      ValidateMatrix(c);
      RequirePositive("runs", c.runs);
      if (c.gap_ms < 0 || c.linger_ms < 0) throw ConfigError("gap_ms and linger_ms must not be negative");
      RequirePositive("connect_timeout_s", c.connect_timeout_s);
      RequirePositive("download_timeout_s", c.download_timeout_s);
      break;
    case Stage::kAnalyze:
      if (!c.captures_dir.empty()) {
        if (!std::filesystem::is_directory(c.captures_dir)) {
          throw ConfigError(fmt::format("captures_dir: '{}' is not a directory", c.captures_dir));
        }
      } else {
        produced(files::kManifest);
      }
      break;
    case Stage::kAttribute:
      RequireFile("prefix_table", c.prefix_table);
      RequireFile("asn_orgs", c.asn_orgs);
      RequireFile("org_groups", c.org_groups);
      produced(files::kTargets);
      break;
    case Stage::kReport:
      produced(files::kMetrics);
      break;
  }
  RequireWritableDir(c.out_dir);
}

}  // namespace optperf::cli

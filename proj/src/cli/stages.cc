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

#include "optperf/cli/stages.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/core.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include "optperf/cdn/attribution.h"
#include "optperf/cdn/prefix_table.h"
#include "optperf/crawler/crawl_target.h"
#include "optperf/crawler/crawler.h"
#include "optperf/metrics/indicator_record.h"
#include "optperf/net/resolver.h"
#include "optperf/orchestrator/measurement.h"
#include "optperf/pipeline/analyze.h"
#include "optperf/report/report.h"
#include "optperf/scanner/scanner.h"

namespace optperf::cli {
namespace {

namespace fs = std::filesystem;

// 2026-01-01T00:00:00Z; every reading advances by one millisecond.
constexpr int64_t kFixedEpochUs = 1'767'225'600'000'000;

std::shared_ptr<net::Resolver> MakeResolver(const PipelineConfig& c) {
  auto r = std::make_shared<net::SystemResolver>();
  if (!c.hosts_file.empty()) r->LoadHostsFile(c.hosts_file);
  r->set_overrides_only(c.hosts_only);
  return r;
}

net::FetchOptions Fetch(const PipelineConfig& c) {
  net::FetchOptions f;
  f.user_agent = c.user_agent.empty() ? DefaultUserAgent() : c.user_agent;
  f.ca_file = c.ca_file;
  f.connect_timeout = std::chrono::seconds(c.connect_timeout_s);
  f.timeout = std::chrono::seconds(c.download_timeout_s);
  return f;
}

// Stage outputs are written in full or not at all.
template <typename F>
void Produce(const fs::path& path, F&& write) {
  const fs::path tmp = path.string() + ".tmp";
  try {
    write(tmp);
    fs::rename(tmp, path);
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw StageError(fmt::format("writing {}: {}", path.string(), e.what()));
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f.flush()) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::string> Domains(const PipelineConfig& c) {
  try {
    return crawler::ReadDomainList(c.domains);
  } catch (const std::exception& e) {
    throw StageError(fmt::format("reading {}: {}", c.domains, e.what()));
  }
}

std::vector<crawler::CrawlTarget> Targets(const PipelineConfig& c) {
  try {
    return crawler::ReadCrawlTargets(c.out_dir / files::kTargets);
  } catch (const std::exception& e) {
    throw StageError(fmt::format("reading {}: {}", (c.out_dir / files::kTargets).string(), e.what()));
  }
}

void Scan(const PipelineConfig& c, std::ostream& out) {
  const auto domains = Domains(c);
  scanner::ScanOptions o;
  o.port = static_cast<uint16_t>(c.scan_port);
  o.timeout = std::chrono::milliseconds(c.scan_timeout_ms);
  o.probes_per_second = c.scan_rate;
  o.max_in_flight = static_cast<size_t>(c.scan_in_flight);
  o.termination = c.termination == "fin" ? scanner::Termination::kFin : scanner::Termination::kRst;
  o.interface = c.scan_interface;
  if (c.dry_run) {
    for (const auto& d : domains) {
      fmt::print(out, "scan: resolve {} and send one SYN (WS, SACK-permitted, ECE|CWR) to port {}, "
                      "answer with {}\n", d, o.port, c.termination == "fin" ? "FIN" : "RST");
    }
    fmt::print(out, "scan: {} probes at most {}/s, {} in flight\n", domains.size(), o.probes_per_second,
               o.max_in_flight);
    return;
  }
  auto resolver = MakeResolver(c);
  std::vector<scanner::OptionSupport> results;
  try {
    results = scanner::ProbeDomains(domains, *resolver, o);
  } catch (const scanner::ScanError& e) {
    throw StageError(fmt::format("scan: {}", e.what()));
  }
  Produce(c.out_dir / files::kScanResults,
          [&](const fs::path& p) { scanner::WriteResultsCsv(p, results); });
  const fs::path stats_path = c.out_dir / files::kDeployment;
  try {
    const auto stats = scanner::AggregateDeployment(results);
    Produce(stats_path, [&](const fs::path& p) { WriteText(p, scanner::StatsToJson(stats) + "\n"); });
  } catch (const std::invalid_argument& e) {
    spdlog::warn("scan: no deployment statistics: {}", e.what());
    std::error_code ec;
    fs::remove(stats_path, ec);
  }
  const auto ok = std::count_if(results.begin(), results.end(), [](const auto& r) {
    return r.status == scanner::ProbeStatus::kOk;
  });
  fmt::print(out, "scan: {} domains, {} answered\n", results.size(), ok);
}

void Crawl(const PipelineConfig& c, std::ostream& out) {
  const auto domains = Domains(c);
  if (c.dry_run) {
    for (const auto& d : domains) {
      fmt::print(out, "crawl: fetch https://{}/robots.txt, then up to {} pages of depth <= {} "
                      "looking for a file >= {} bytes\n", d, c.crawl_pages, c.crawl_depth, c.min_size);
    }
    return;
  }
  crawler::CrawlOptions o;
  o.max_depth = c.crawl_depth;
  o.max_pages = c.crawl_pages;
  o.min_size = c.min_size;
  o.probe_slack = c.probe_slack;
  o.request_gap = std::chrono::milliseconds(c.request_gap_ms);
  o.fetch = Fetch(c);
  auto resolver = MakeResolver(c);
  const crawler::Crawler crawler(o, *resolver);
  const auto results = crawler.CrawlDomains(domains, static_cast<size_t>(c.crawl_concurrency));
  std::vector<crawler::CrawlTarget> targets;
  for (const auto& r : results) {
    if (r.target) targets.push_back(*r.target);
  }
  Produce(c.out_dir / files::kTargets,
          [&](const fs::path& p) { crawler::WriteCrawlTargets(p, targets); });
  Produce(c.out_dir / files::kCrawlReport,
          [&](const fs::path& p) { crawler::WriteCrawlReport(p, results); });
  fmt::print(out, "crawl: {} domains, {} targets\n", results.size(), targets.size());
}

orchestrator::OrchestratorOptions DownloadOptions(const PipelineConfig& c) {
  orchestrator::OrchestratorOptions o;
  std::vector<std::string> ids;
  for (const auto& spec : c.quic_clients) {
    auto a = orchestrator::ParseQuicAdapter(spec);
    ids.push_back(a.id);
    o.quic_adapters[a.id] = a;
  }
  o.matrix = c.matrix.empty() ? orchestrator::DefaultMatrix(ids) : orchestrator::ParseMatrix(c.matrix);
  o.vantage_point = c.vantage_point;
  o.fetch = Fetch(c);
  o.gap = std::chrono::milliseconds(c.gap_ms);
  o.capture_linger = std::chrono::milliseconds(c.linger_ms);
  o.capture_dir = c.out_dir / files::kCaptures;
  o.capture_interface = c.capture_interface;
  return o;
}

void Download(const PipelineConfig& c, std::ostream& out) {
  const auto targets = Targets(c);
  auto o = DownloadOptions(c);
  if (c.dry_run) {
    for (int r = 1; r <= c.runs; ++r) {
      for (const auto& t : targets) {
        for (const auto& cfg : o.matrix) {
          fmt::print(out, "download: run {} {} {}: resolve {}, ", r, t.domain, cfg.name, t.domain);
          if (cfg.is_quic()) {
            fmt::print(out, "run QUIC client '{}' for {}\n", cfg.quic_client(), t.file_url);
          } else {
            fmt::print(out, "set ecn={} sack={} ws={}, capture, GET {}\n", cfg.ecn, cfg.sack, cfg.ws,
                       t.file_url);
          }
        }
      }
    }
    return;
  }
  orchestrator::WallClock clock = orchestrator::SystemWallClockUs;
  if (c.fixed_clock) {
    clock = [t = kFixedEpochUs]() mutable { return t += 1000; };
  }
  std::vector<orchestrator::MeasurementRun> runs;
  const fs::path manifest = c.out_dir / files::kManifest;
  try {
    orchestrator::Orchestrator orch(o, MakeResolver(c), clock);
    for (int r = 1; r <= c.runs; ++r) {
      for (const auto& t : targets) {
        runs.push_back(orch.Run(t, std::to_string(r)));
        spdlog::info("download: run {} of {} done", r, t.domain);
      }
    }
  } catch (const orchestrator::MatrixError& e) {
    throw ConfigError(e.what());
  } catch (const std::exception& e) {
    throw StageError(fmt::format("download: {}", e.what()));
  }
  try {
    // Capture paths in the manifest are relative to its location.
    orchestrator::WriteManifest(manifest, runs);
  } catch (const std::exception& e) {
    throw StageError(fmt::format("writing {}: {}", manifest.string(), e.what()));
  }
  size_t entries = 0, ok = 0;
  for (const auto& run : runs) {
    for (const auto& e : run.entries) {
      ++entries;
      ok += e.outcome == orchestrator::Outcome::kOk;
    }
  }
  fmt::print(out, "download: {} runs, {} downloads, {} OK\n", runs.size(), entries, ok);
}

std::string RelativeTo(const std::string& path, const fs::path& base) {
  if (path.empty()) return path;
  const auto rel = fs::absolute(path).lexically_normal().lexically_relative(fs::absolute(base));
  return rel.empty() ? path : rel.string();
}

pipeline::AnalysisOutput AnalyzeDirectory(const PipelineConfig& c) {
  std::vector<fs::path> captures;
  for (const auto& e : fs::directory_iterator(c.captures_dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".pcap" || ext == ".cap")) captures.push_back(e.path());
  }
  std::sort(captures.begin(), captures.end());
  pipeline::AnalysisOutput out;
  for (const auto& p : captures) {
    std::string error;
    std::optional<pipeline::CaptureAnalysis> a;
    for (bool quic : {false, true}) {
      try {
        a = pipeline::AnalyzeCapture(p, quic);
        break;
      } catch (const std::exception& e) {
        if (error.empty()) error = e.what();
      }
    }
    if (!a) {
      report::FailureRecord f;
      f.domain = p.stem().string();
      f.vantage_point = c.vantage_point;
      f.outcome = "AnalysisError";
      f.reason = error;
      f.capture = p.filename().string();
      out.failures.push_back(std::move(f));
      continue;
    }
    metrics::IndicatorRecord r;
    r.config = a->flow.is_tcp() ? "TCP" : "QUIC";
    r.domain = p.stem().string();
    r.target_ip = a->flow.responder.address.ToString();
    r.vantage_point = c.vantage_point;
    r.capture = p.filename().string();
    r.indicators = a->indicators;
    out.records.push_back(std::move(r));
  }
  return out;
}

void Analyze(const PipelineConfig& c, std::ostream& out) {
  pipeline::AnalysisOutput a;
  if (!c.captures_dir.empty()) {
    a = AnalyzeDirectory(c);
  } else {
    std::vector<orchestrator::MeasurementRun> runs;
    try {
      runs = orchestrator::ReadManifest(c.out_dir / files::kManifest);
    } catch (const std::exception& e) {
      throw StageError(fmt::format("reading manifest: {}", e.what()));
    }
    a = pipeline::AnalyzeRuns(runs);
    for (auto& r : a.records) r.capture = RelativeTo(r.capture, c.out_dir);
    for (auto& f : a.failures) f.capture = RelativeTo(f.capture, c.out_dir);
  }
  Produce(c.out_dir / files::kMetrics,
          [&](const fs::path& p) { metrics::WriteIndicatorCsv(p, a.records); });
  Produce(c.out_dir / files::kMetricsJson,
          [&](const fs::path& p) { metrics::WriteIndicatorJsonLines(p, a.records); });
  Produce(c.out_dir / files::kFailures,
          [&](const fs::path& p) { report::WriteFailureCsv(p, a.failures); });
  fmt::print(out, "analyze: {} indicator rows, {} failures\n", a.records.size(), a.failures.size());
}

void Attribute(const PipelineConfig& c, std::ostream& out) {
  const auto targets = Targets(c);
  cdn::PrefixTable table;
  cdn::OrgMap orgs;
  try {
    table = cdn::LoadPrefixTable(c.prefix_table);
    orgs = cdn::OrgMap::Load(c.asn_orgs, c.org_groups);
  } catch (const std::exception& e) {
    throw StageError(fmt::format("attribute: {}", e.what()));
  }
  // Every address a domain resolved to during crawling and downloading.
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& t : targets) {
    if (!t.resolved_ip.empty()) seen[t.domain].insert(t.resolved_ip);
  }
  const fs::path manifest = c.out_dir / files::kManifest;
  if (fs::exists(manifest)) {
    try {
      for (const auto& run : orchestrator::ReadManifest(manifest)) {
        for (const auto& e : run.entries) {
          if (!e.resolved_ip.empty()) seen[run.domain].insert(e.resolved_ip);
        }
      }
    } catch (const std::exception& e) {
      throw StageError(fmt::format("reading manifest: {}", e.what()));
    }
  }
  std::vector<cdn::DomainAttribution> rows;
  std::set<std::string> done;
  for (const auto& t : targets) {
    if (!done.insert(t.domain).second) continue;
    std::vector<IpAddress> addresses;
    for (const auto& s : seen[t.domain]) {
      if (auto a = IpAddress::Parse(s)) addresses.push_back(*a);
    }
    rows.push_back(cdn::ClassifyDomain(t.domain, addresses, table, orgs));
  }
  Produce(c.out_dir / files::kAttribution,
          [&](const fs::path& p) { cdn::WriteAttributionCsv(p, rows); });
  std::map<std::string, size_t> per_group;
  for (const auto& r : rows) ++per_group[cdn::ToString(r.group)];
  std::string summary;
  for (const auto& [g, n] : per_group) summary += fmt::format(" {}={}", g, n);
  fmt::print(out, "attribute: {} domains{}\n", rows.size(), summary);
}

void Report(const PipelineConfig& c, std::ostream& out) {
  report::ReportInputs in;
  try {
    in.records = metrics::ReadIndicatorCsv(c.out_dir / files::kMetrics);
    if (fs::exists(c.out_dir / files::kFailures)) {
      in.failures = report::ReadFailureCsv(c.out_dir / files::kFailures);
    }
    if (fs::exists(c.out_dir / files::kAttribution)) {
      in.domain_groups = cdn::ReadDomainGroups(c.out_dir / files::kAttribution);
    }
  } catch (const std::exception& e) {
    throw StageError(fmt::format("report: {}", e.what()));
  }
  report::ReportSummary s;
  try {
    s = report::RenderOutputs(in, c.out_dir / files::kReportDir);
  } catch (const std::exception& e) {
    throw StageError(fmt::format("report: {}", e.what()));
  }
  fmt::print(out, "report: {} speed-ups, {} skipped pairs, {} CDF files in {}\n", s.speedups,
             s.skipped, s.cdf_files.size(), (c.out_dir / files::kReportDir).string());
}

}  // namespace

void RunStage(Stage stage, const PipelineConfig& c, std::ostream& out) {
  switch (stage) {
    case Stage::kScan: return Scan(c, out);
    case Stage::kCrawl: return Crawl(c, out);
    case Stage::kDownload: return Download(c, out);
    case Stage::kAnalyze: return Analyze(c, out);
    case Stage::kAttribute: return Attribute(c, out);
    case Stage::kReport: return Report(c, out);
  }
}

void RunPipeline(const PipelineConfig& c, std::ostream& out) {
  const Stage stages[] = {Stage::kScan,    Stage::kCrawl,     Stage::kDownload,
                          Stage::kAnalyze, Stage::kAttribute, Stage::kReport};
  for (Stage s : stages) Validate(c, s, true);
  for (Stage s : stages) {
    // A dry run has no files to hand to the offline stages.
    if (c.dry_run && !TouchesNetwork(s)) break;
    if (c.dry_run && s == Stage::kDownload && !fs::exists(c.out_dir / files::kTargets)) {
      fmt::print(out, "download: one run per crawled target and matrix entry, {} runs each\n",
                 c.runs);
      break;
    }
    RunStage(s, c, out);
  }
}

}  // namespace optperf::cli

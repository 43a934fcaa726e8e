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

// optperf: command-line entry point chaining scan, crawl, download,
// analyze, attribute and report.

#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "optperf/cli/config.h"
#include "optperf/cli/stages.h"

namespace {

using optperf::cli::PipelineConfig;
using optperf::cli::Stage;

void AddOptions(CLI::App& app, PipelineConfig& c) {
  const auto env = [](CLI::Option* o, const char* name) { return o->envname(name); };
  // Paths.
  app.add_option("--domains", c.domains, "Domain list, one per line")->group("Paths");
  env(app.add_option("--out-dir", c.out_dir, "Directory for every stage's files"),
      "OPTPERF_OUT_DIR")->group("Paths")->capture_default_str();
  app.add_option("--prefix-table", c.prefix_table, "prefix2as text or MRT RIB dump")->group("Paths");
  app.add_option("--asn-orgs", c.asn_orgs, "CSV asn,org_id,org_name")->group("Paths");
  app.add_option("--org-groups", c.org_groups, "CSV org_id,group")->group("Paths");
  app.add_option("--hosts-file", c.hosts_file, "Name overrides, hosts(5) format")->group("Paths");
  app.add_flag("--hosts-only", c.hosts_only, "Resolve only names in the hosts file")
      ->group("Paths");
  app.add_option("--ca-file", c.ca_file, "PEM bundle replacing the system trust store")
      ->group("Paths");
  env(app.add_option("--vantage-point", c.vantage_point, "Label recorded with every download"),
      "OPTPERF_VANTAGE_POINT")->capture_default_str();
  app.add_option("--user-agent", c.user_agent, "HTTP User-Agent and robots.txt product token");

  // Crawling.
  app.add_option("--crawl-depth", c.crawl_depth, "Link depth below the index page")
      ->group("Crawl")->capture_default_str();
  app.add_option("--crawl-pages", c.crawl_pages, "Pages per domain")->group("Crawl")->capture_default_str();
  app.add_option("--min-size", c.min_size, "Smallest acceptable file, bytes")
      ->group("Crawl")->capture_default_str();
  app.add_option("--probe-slack", c.probe_slack, "Bytes a size probe may read past min-size")
      ->group("Crawl")->capture_default_str();
  app.add_option("--crawl-concurrency", c.crawl_concurrency, "Domains crawled at once")
      ->group("Crawl")->capture_default_str();
  app.add_option("--request-gap-ms", c.request_gap_ms, "Pause between requests to one domain")
      ->group("Crawl")->capture_default_str();

  // Downloads.
  // A list so that an unquoted "matrix = WARMUP,BL" in the config file works.
  app.add_option_function<std::vector<std::string>>(
         "--matrix",
         [&c](const std::vector<std::string>& v) {
           c.matrix.clear();
           for (const auto& part : v) c.matrix += (c.matrix.empty() ? "" : ",") + part;
         },
         "Comma-separated configs (default WARMUP,BL,ECN,SACK,WS,ALL plus one QUIC entry per "
         "client)")
      ->delimiter(',')
      ->group("Download");
  app.add_option("--quic-client", c.quic_clients,
                 "QUIC adapter id=command; placeholders {url} {ip} {host} {port} {output}")
      ->group("Download");
  app.add_option("--runs", c.runs, "Measurement runs per target")->group("Download")->capture_default_str();
  app.add_option("--gap-ms", c.gap_ms, "Pause between downloads")->group("Download")->capture_default_str();
  app.add_option("--linger-ms", c.linger_ms, "Capture time after each download")
      ->group("Download")->capture_default_str();
  app.add_option("--connect-timeout-s", c.connect_timeout_s, "TCP and TLS setup limit")
      ->group("Download")->capture_default_str();
  app.add_option("--download-timeout-s", c.download_timeout_s, "Whole-transfer limit")
      ->group("Download")->capture_default_str();
  app.add_option("--capture-interface", c.capture_interface, "Capture interface (default all)")
      ->group("Download");
  app.add_flag("--fixed-clock", c.fixed_clock, "Deterministic timestamps in the manifest")
      ->group("Download");

  // Scanner.
  app.add_option("--scan-port", c.scan_port, "Probe destination port")->group("Scan")->capture_default_str();
  app.add_option("--scan-rate", c.scan_rate, "Probes per second")->group("Scan")->capture_default_str();
  app.add_option("--scan-in-flight", c.scan_in_flight, "Unanswered probes at once")
      ->group("Scan")->capture_default_str();
  app.add_option("--scan-timeout-ms", c.scan_timeout_ms, "Wait for a SYN-ACK")
      ->group("Scan")->capture_default_str();
  app.add_option("--termination", c.termination, "Close probes with rst or fin")
      ->group("Scan")->check(CLI::IsMember({"rst", "fin"}))->capture_default_str();
  app.add_option("--scan-interface", c.scan_interface, "Interface answers arrive on")->group("Scan");

  app.add_option("--captures-dir", c.captures_dir,
                 "analyze: every .pcap in this directory instead of the manifest");
  app.add_flag("--i-have-authorization", c.authorized,
               "Confirm you may send measurement traffic to the listed hosts");
  app.add_flag("--dry-run", c.dry_run, "Print planned network actions, send nothing");
}

nlohmann::ordered_json Schema(const CLI::App& app) {
  nlohmann::ordered_json options = nlohmann::ordered_json::array();
  for (const CLI::Option* o : app.get_options()) {
    if (o->get_lnames().empty()) continue;
    const std::string name = o->get_lnames().front();
    if (name == "help" || name == "config" || name == "config-schema" || name == "version") continue;
    nlohmann::ordered_json j;
    j["key"] = name;
    j["flag"] = "--" + name;
    j["type"] = o->get_type_size() == 0 ? "BOOLEAN" : o->get_type_name();
    j["multiple"] = o->get_expected_max() > 1;
    j["default"] = o->get_default_str();
    j["group"] = o->get_group();
    j["description"] = o->get_description();
    if (!o->get_envname().empty()) j["env"] = o->get_envname();
    options.push_back(std::move(j));
  }
  nlohmann::ordered_json subs = nlohmann::ordered_json::array();
  for (const CLI::App* s : app.get_subcommands({})) subs.push_back(s->get_name());
  nlohmann::ordered_json out;
  out["version"] = OPTPERF_VERSION;
  out["config_format"] = "INI, one key = value per line; keys are the option names without leading dashes";
  out["subcommands"] = subs;
  out["options"] = options;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure the effect of TCP options and QUIC clients on download throughput"};
  app.set_version_flag("--version", OPTPERF_VERSION);
  app.set_config("--config", "", "INI file with option values; flags override it");
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(0, 1);
  PipelineConfig c;
  AddOptions(app, c);
  bool schema = false;
  app.add_flag("--config-schema", schema, "Print every option as JSON and exit");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();

  const std::pair<const char*, const char*> subcommands[] = {
      {"scan", "Probe option support with single SYNs"},
      {"crawl", "Find a large file per domain"},
      {"download", "Run the download matrix for every target"},
      {"analyze", "Turn captures into indicator records"},
      {"attribute", "Map target addresses to CDN groups"},
      {"report", "Speed-up buckets, counts and CDF series"},
      {"pipeline", "All stages in order"},
  };
  for (const auto& [name, help] : subcommands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "optperf: " << e.what() << "\n";
    return 2;
  }
  if (schema) {
    std::cout << Schema(app).dump(2) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("optperf"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "pipeline") {
      optperf::cli::RunPipeline(c, std::cout);
    } else {
      const std::map<std::string, Stage> stages = {
          {"scan", Stage::kScan},         {"crawl", Stage::kCrawl},
          {"download", Stage::kDownload}, {"analyze", Stage::kAnalyze},
          {"attribute", Stage::kAttribute}, {"report", Stage::kReport}};
      const Stage s = stages.at(cmd);
      optperf::cli::Validate(c, s);
      optperf::cli::RunStage(s, c, std::cout);
    }
  } catch (const optperf::cli::ConfigError& e) {
    std::cerr << "optperf: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "optperf: " << cmd << " failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

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

#include "optperf/orchestrator/measurement.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "optperf/orchestrator/host_options.h"
#include "optperf/orchestrator/packet_capture.h"

namespace optperf::orchestrator {
namespace {

std::string Safe(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_') c = '-';
  }
  return out;
}

std::string Describe(const HostTcpSettings& s) {
  std::string rmem = s.tcp_rmem.substr(s.tcp_rmem.rfind(' ') + 1);
  return "ecn=" + s.tcp_ecn + " sack=" + s.tcp_sack + " ws=" + s.tcp_window_scaling +
         " rmem_max=" + rmem;
}

}  // namespace

int64_t SystemWallClockUs() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string CaptureFileName(const std::string& run_id, const std::string& domain,
                            const std::string& config) {
  return Safe(run_id) + "_" + Safe(domain) + "_" + Safe(config) + ".pcap";
}

Orchestrator::Orchestrator(OrchestratorOptions options, std::shared_ptr<net::Resolver> resolver,
                           WallClock clock)
    : options_(std::move(options)), resolver_(std::move(resolver)), clock_(std::move(clock)) {
  ValidateMatrix(options_.matrix);
  for (const auto& c : options_.matrix) {
    if (c.is_quic() && !options_.quic_adapters.count(c.quic_client())) {
      throw MatrixError("no QUIC adapter registered for client '" + c.quic_client() + "'");
    }
  }
}

MeasurementRun Orchestrator::Run(const crawler::CrawlTarget& target, const std::string& run_id) {
  const auto url = net::Url::Parse(target.file_url);
  if (!url) throw std::invalid_argument("bad file URL '" + target.file_url + "'");
  if (options_.capture) std::filesystem::create_directories(options_.capture_dir);
  MeasurementRun run;
  run.run_id = run_id;
  run.domain = target.domain;
  run.url = url->ToString();
  run.vantage_point = options_.vantage_point;
  for (size_t i = 0; i < options_.matrix.size(); ++i) {
    if (i > 0) std::this_thread::sleep_for(options_.gap);
    run.entries.push_back(RunOne(options_.matrix[i], *url, target.domain, run_id));
  }
  return run;
}

RunEntry Orchestrator::RunOne(const OptionConfig& config, const net::Url& url,
                              const std::string& domain, const std::string& run_id) {
  RunEntry e;
  e.config = config.name;
  e.resolved_at_us = clock_();
  IpAddress ip;
  try {
    ip = net::PreferV4(resolver_->Resolve(url.host));
  } catch (const net::ResolveError& err) {
    e.outcome = Outcome::kDnsFail;
    e.reason = err.what();
    e.start_us = e.end_us = clock_();
    return e;
  }
  e.resolved_ip = ip.ToString();

  std::optional<AppliedOptions> applied;
  if (options_.configure_host) {
    applied.emplace(config);
    e.host_settings = Describe(applied->applied());
  }

  std::optional<PacketCapture> cap;
  const std::filesystem::path cap_path =
      options_.capture_dir / CaptureFileName(run_id, domain, config.name);
  if (options_.capture) {
    CaptureFilter filter{ip, {static_cast<uint16_t>(url.port)}};
    cap.emplace(cap_path, filter, options_.capture_interface);
    e.capture = cap_path.string();
  }

  e.start_us = clock_();
  DownloadResult r;
  if (config.is_quic()) {
    const auto& adapter = options_.quic_adapters.at(config.quic_client());
    const std::filesystem::path body =
        options_.capture_dir / (CaptureFileName(run_id, domain, config.name) + ".body");
    try {
      r = RunQuicAdapter(adapter, url, ip, body, options_.fetch.timeout);
    } catch (const std::runtime_error& err) {
      r.outcome = Outcome::kConnectFail;
      r.reason = err.what();
    }
    std::error_code ec;
    std::filesystem::remove(body, ec);
    if (r.outcome == Outcome::kOk) std::filesystem::remove(body.string() + ".log", ec);
  } else {
    r = ForcedIpDownload(url, ip, options_.fetch);
  }
  if (cap) {
    std::this_thread::sleep_for(options_.capture_linger);
    const CaptureStats st = cap->Stop();
    e.capture_packets = st.written;
    e.capture_drops = st.kernel_drops;
  }
  e.end_us = clock_();
  e.outcome = r.outcome;
  e.reason = r.reason;
  e.http_status = r.http_status;
  e.bytes = r.bytes;
  return e;
}

void WriteManifest(const std::filesystem::path& path, const std::vector<MeasurementRun>& runs) {
  const auto base = std::filesystem::absolute(path).parent_path();
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : runs) {
    nlohmann::ordered_json r;
    r["run_id"] = run.run_id;
    r["domain"] = run.domain;
    r["url"] = run.url;
    r["vantage_point"] = run.vantage_point;
    r["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : run.entries) {
      std::string cap = e.capture;
      if (!cap.empty()) {
        cap = std::filesystem::absolute(cap).lexically_normal().lexically_relative(base).string();
      }
      r["entries"].push_back({{"config", e.config},
                              {"resolved_ip", e.resolved_ip},
                              {"resolved_at_us", e.resolved_at_us},
                              {"capture", cap},
                              {"start_us", e.start_us},
                              {"end_us", e.end_us},
                              {"outcome", ToString(e.outcome)},
                              {"reason", e.reason},
                              {"http_status", e.http_status},
                              {"bytes", e.bytes},
                              {"capture_packets", e.capture_packets},
                              {"capture_drops", e.capture_drops},
                              {"host_settings", e.host_settings}});
    }
    j["runs"].push_back(std::move(r));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<MeasurementRun> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  const auto base = std::filesystem::absolute(path).parent_path();
  std::vector<MeasurementRun> runs;
  try {
    for (const auto& r : j.at("runs")) {
      MeasurementRun run;
      run.run_id = r.at("run_id").get<std::string>();
      run.domain = r.at("domain").get<std::string>();
      run.url = r.at("url").get<std::string>();
      run.vantage_point = r.at("vantage_point").get<std::string>();
      for (const auto& x : r.at("entries")) {
        RunEntry e;
        e.config = x.at("config").get<std::string>();
        e.resolved_ip = x.value("resolved_ip", "");
        e.resolved_at_us = x.value("resolved_at_us", int64_t{0});
        e.capture = x.value("capture", "");
        if (!e.capture.empty()) e.capture = (base / e.capture).lexically_normal().string();
        e.start_us = x.value("start_us", int64_t{0});
        e.end_us = x.value("end_us", int64_t{0});
        const auto o = ParseOutcome(x.at("outcome").get<std::string>());
        if (!o) throw std::runtime_error("unknown outcome " + x.at("outcome").dump());
        e.outcome = *o;
        e.reason = x.value("reason", "");
        e.http_status = x.value("http_status", 0);
        e.bytes = x.value("bytes", uint64_t{0});
        e.capture_packets = x.value("capture_packets", uint64_t{0});
        e.capture_drops = x.value("capture_drops", uint64_t{0});
        e.host_settings = x.value("host_settings", "");
        run.entries.push_back(std::move(e));
      }
      runs.push_back(std::move(run));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return runs;
}

}  // namespace optperf::orchestrator

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

#include "optperf/pipeline/analyze.h"

#include "optperf/capture/pcap.h"
#include "optperf/orchestrator/host_options.h"

namespace optperf::pipeline {
namespace {

uint64_t IpBytes(const capture::Flow& f) {
  uint64_t n = 0;
  for (const auto& p : f.packets) n += p.ip_total_length;
  return n;
}

}  // namespace

std::optional<capture::Flow> SelectDownloadFlow(std::vector<capture::Flow> flows, bool quic) {
  std::optional<capture::Flow> best;
  uint64_t best_bytes = 0;
  for (auto& f : flows) {
    if (f.is_tcp() == quic) continue;
    const uint64_t b = IpBytes(f);
    if (!best || b > best_bytes) {
      best_bytes = b;
      best = std::move(f);
    }
  }
  return best;
}

CaptureAnalysis AnalyzeCapture(const std::filesystem::path& path, bool quic) {
  auto cap = capture::ReadCaptureFile(path);
  auto flow = SelectDownloadFlow(capture::DemuxFlows(std::move(cap.packets)), quic);
  if (!flow) {
    throw std::runtime_error(std::string("no ") + (quic ? "UDP" : "TCP") + " flow in " +
                             path.string());
  }
  CaptureAnalysis a{std::move(*flow), {}};
  a.indicators = metrics::ComputeIndicators(a.flow);
  return a;
}

AnalysisOutput AnalyzeRuns(const std::vector<orchestrator::MeasurementRun>& runs) {
  AnalysisOutput out;
  for (const auto& run : runs) {
    for (const auto& e : run.entries) {
      report::FailureRecord fail{e.config, run.domain, e.resolved_ip, run.vantage_point,
                                 run.run_id, orchestrator::ToString(e.outcome), e.reason,
                                 e.capture};
      if (e.outcome != orchestrator::Outcome::kOk) {
        out.failures.push_back(std::move(fail));
        continue;
      }
      if (e.capture.empty()) {
        fail.outcome = "NoCapture";
        fail.reason = "download succeeded without a capture";
        out.failures.push_back(std::move(fail));
        continue;
      }
      const auto config = orchestrator::OptionConfig::Named(e.config);
      try {
        auto a = AnalyzeCapture(e.capture, config.is_quic());
        if (!config.is_quic()) {
          const auto syn = orchestrator::FirstSyn(a.flow.packets);
          const auto want = orchestrator::ExpectedSyn(config);
          if (syn && *syn != want) {
            fail.outcome = "ConfigMismatch";
            fail.reason = "SYN carried " + syn->ToString() + ", expected " + want.ToString();
            out.failures.push_back(std::move(fail));
            continue;
          }
        }
        metrics::IndicatorRecord r;
        r.config = e.config;
        r.domain = run.domain;
        r.target_ip = e.resolved_ip;
        r.vantage_point = run.vantage_point;
        r.run_id = run.run_id;
        r.capture = e.capture;
        r.indicators = a.indicators;
        out.records.push_back(std::move(r));
      } catch (const std::exception& ex) {
        fail.outcome = "AnalysisError";
        fail.reason = ex.what();
        out.failures.push_back(std::move(fail));
      }
    }
  }
  return out;
}

}  // namespace optperf::pipeline

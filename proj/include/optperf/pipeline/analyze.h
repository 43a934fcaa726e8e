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

#ifndef OPTPERF_PIPELINE_ANALYZE_H_
#define OPTPERF_PIPELINE_ANALYZE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "optperf/capture/flow.h"
#include "optperf/metrics/indicator_record.h"
#include "optperf/orchestrator/measurement.h"
#include "optperf/report/report.h"

namespace optperf::pipeline {

// The download's flow in a capture: the flow of the requested transport
// carrying the most IP bytes. nullopt if there is none.
std::optional<capture::Flow> SelectDownloadFlow(std::vector<capture::Flow> flows, bool quic);

struct CaptureAnalysis {
  capture::Flow flow;
  metrics::PerfIndicators indicators;
};

// Throws capture::CaptureError, metrics::UndefinedThroughput or
// std::runtime_error (no suitable flow).
CaptureAnalysis AnalyzeCapture(const std::filesystem::path& path, bool quic);

struct AnalysisOutput {
  std::vector<metrics::IndicatorRecord> records;
  std::vector<report::FailureRecord> failures;
};

// One indicator record per OK entry whose capture analyzes; every other
// entry becomes a failure record, so entries = records + failures. TCP
// entries whose SYN does not match their configuration are failures too.
AnalysisOutput AnalyzeRuns(const std::vector<orchestrator::MeasurementRun>& runs);

}  // namespace optperf::pipeline

#endif  // OPTPERF_PIPELINE_ANALYZE_H_

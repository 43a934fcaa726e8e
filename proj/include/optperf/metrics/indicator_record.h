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

#ifndef OPTPERF_METRICS_INDICATOR_RECORD_H_
#define OPTPERF_METRICS_INDICATOR_RECORD_H_

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>
#include "optperf/metrics/metrics.h"

namespace optperf::metrics {

// One analyzed download: identification plus its indicators. Serialized as
// a flat CSV row or JSON object. The first eighteen columns are the fixed
// interface; the remaining ones are auxiliary.
struct IndicatorRecord {
  std::string config;
  std::string domain;
  std::string target_ip;
  std::string vantage_point;
  std::string run_id;
  std::string capture;
  PerfIndicators indicators;
};

const std::vector<std::string>& IndicatorCsvHeader();
std::vector<std::string> ToCsvRow(const IndicatorRecord& r);
nlohmann::ordered_json ToJson(const IndicatorRecord& r);

// Reads a metrics CSV written by WriteIndicatorCsv. Unknown columns are
// ignored; missing auxiliary columns default to empty.
std::vector<IndicatorRecord> ReadIndicatorCsv(const std::filesystem::path& path);
void WriteIndicatorCsv(const std::filesystem::path& path,
                       const std::vector<IndicatorRecord>& records);
void WriteIndicatorJsonLines(const std::filesystem::path& path,
                             const std::vector<IndicatorRecord>& records);

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace optperf::metrics

#endif  // OPTPERF_METRICS_INDICATOR_RECORD_H_

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

#include "optperf/metrics/indicator_record.h"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>
#include "optperf/common/csv.h"

namespace optperf::metrics {
namespace {

std::string Opt(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

double ParseDouble(const std::string& s) {
  return s.empty() ? 0.0 : std::strtod(s.c_str(), nullptr);
}

uint64_t ParseU64(const std::string& s) {
  return s.empty() ? 0 : std::strtoull(s.c_str(), nullptr, 10);
}

std::optional<double> ParseOpt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string FormatDouble(double v) { return fmt::format("{}", v); }

const std::vector<std::string>& IndicatorCsvHeader() {
  static const std::vector<std::string> kHeader = {
      "config",        "domain",       "target_ip",   "vantage_point",
      "bytes_total",   "duration_s",   "mean_throughput_bps",
      "goodput_bps",   "mean_rtt_ms",  "rtt_samples", "retx_rate",
      "ece_flags",     "cwr_flags",    "ect0",        "ect1",
      "ce",            "sack_packets", "sack_blocks",
      // auxiliary
      "run_id",        "transport",    "responder_throughput_bps",
      "mean_rtt_initiator_ms",         "capture"};
  return kHeader;
}

std::vector<std::string> ToCsvRow(const IndicatorRecord& r) {
  const PerfIndicators& m = r.indicators;
  const bool tcp = !m.quic;
  auto tcp_only = [&](auto v) { return tcp ? fmt::format("{}", v) : std::string(); };
  return {r.config,
          r.domain,
          r.target_ip,
          r.vantage_point,
          std::to_string(m.bytes_total),
          FormatDouble(m.duration_s),
          FormatDouble(m.mean_throughput_bps),
          tcp ? FormatDouble(m.goodput_bps) : std::string(),
          tcp ? Opt(m.mean_rtt_ms) : std::string(),
          tcp_only(m.rtt_sample_count),
          tcp ? FormatDouble(m.retransmission_rate) : std::string(),
          tcp_only(m.ecn.ece_flags),
          tcp_only(m.ecn.cwr_flags),
          tcp_only(m.ecn.ect0),
          tcp_only(m.ecn.ect1),
          tcp_only(m.ecn.ce),
          tcp_only(m.sack.packets_with_sack_blocks),
          tcp_only(m.sack.total_sack_blocks),
          r.run_id,
          m.quic ? "udp" : "tcp",
          FormatDouble(m.responder_throughput_bps),
          tcp ? Opt(m.mean_rtt_initiator_ms) : std::string(),
          r.capture};
}

nlohmann::ordered_json ToJson(const IndicatorRecord& r) {
  const auto& header = IndicatorCsvHeader();
  const auto row = ToCsvRow(r);
  nlohmann::ordered_json j;
  const PerfIndicators& m = r.indicators;
  for (size_t i = 0; i < header.size(); ++i) {
    const std::string& k = header[i];
    const std::string& v = row[i];
    if (k == "config" || k == "domain" || k == "target_ip" || k == "vantage_point" ||
        k == "run_id" || k == "transport" || k == "capture") {
      j[k] = v;
    } else if (v.empty()) {
      j[k] = nullptr;
    } else if (k == "bytes_total") {
      j[k] = m.bytes_total;
    } else if (k == "rtt_samples" || k == "ece_flags" || k == "cwr_flags" || k == "ect0" ||
               k == "ect1" || k == "ce" || k == "sack_packets" || k == "sack_blocks") {
      j[k] = std::strtoull(v.c_str(), nullptr, 10);
    } else {
      j[k] = std::strtod(v.c_str(), nullptr);
    }
  }
  return j;
}

std::vector<IndicatorRecord> ReadIndicatorCsv(const std::filesystem::path& path) {
  const auto table = csv::Table::ReadFile(path);
  std::vector<IndicatorRecord> out;
  out.reserve(table.size());
  auto get = [&](size_t i, const char* col) { return table.get(i, col).value_or(""); };
  for (size_t i = 0; i < table.size(); ++i) {
    IndicatorRecord r;
    r.config = table.at(i, "config");
    r.domain = table.at(i, "domain");
    r.target_ip = table.at(i, "target_ip");
    r.vantage_point = table.at(i, "vantage_point");
    r.run_id = get(i, "run_id");
    r.capture = get(i, "capture");
    PerfIndicators& m = r.indicators;
    m.quic = get(i, "transport") == "udp";
    m.bytes_total = ParseU64(table.at(i, "bytes_total"));
    m.duration_s = ParseDouble(table.at(i, "duration_s"));
    m.mean_throughput_bps = ParseDouble(table.at(i, "mean_throughput_bps"));
    m.goodput_bps = ParseDouble(table.at(i, "goodput_bps"));
    m.mean_rtt_ms = ParseOpt(table.at(i, "mean_rtt_ms"));
    m.rtt_sample_count = ParseU64(table.at(i, "rtt_samples"));
    m.retransmission_rate = ParseDouble(table.at(i, "retx_rate"));
    m.ecn.ece_flags = ParseU64(table.at(i, "ece_flags"));
    m.ecn.cwr_flags = ParseU64(table.at(i, "cwr_flags"));
    m.ecn.ect0 = ParseU64(table.at(i, "ect0"));
    m.ecn.ect1 = ParseU64(table.at(i, "ect1"));
    m.ecn.ce = ParseU64(table.at(i, "ce"));
    m.sack.packets_with_sack_blocks = ParseU64(table.at(i, "sack_packets"));
    m.sack.total_sack_blocks = ParseU64(table.at(i, "sack_blocks"));
    m.responder_throughput_bps = ParseDouble(get(i, "responder_throughput_bps"));
    m.mean_rtt_initiator_ms = ParseOpt(get(i, "mean_rtt_initiator_ms"));
    out.push_back(std::move(r));
  }
  return out;
}

void WriteIndicatorCsv(const std::filesystem::path& path,
                       const std::vector<IndicatorRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  csv::WriteRow(out, IndicatorCsvHeader());
  for (const auto& r : records) csv::WriteRow(out, ToCsvRow(r));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void WriteIndicatorJsonLines(const std::filesystem::path& path,
                             const std::vector<IndicatorRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) out << ToJson(r).dump() << '\n';
}

}  // namespace optperf::metrics

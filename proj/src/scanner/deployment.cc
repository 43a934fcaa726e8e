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

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "optperf/common/csv.h"
#include "optperf/scanner/scanner.h"

namespace optperf::scanner {

const char* ToString(ProbeStatus s) {
  switch (s) {
    case ProbeStatus::kOk: return "OK";
    case ProbeStatus::kNoAnswer: return "NoAnswer";
    case ProbeStatus::kRefused: return "Refused";
    case ProbeStatus::kResolveFailed: return "ResolveFailed";
  }
  return "NoAnswer";
}

std::optional<ProbeStatus> ParseProbeStatus(std::string_view s) {
  for (auto st : {ProbeStatus::kOk, ProbeStatus::kNoAnswer, ProbeStatus::kRefused,
                  ProbeStatus::kResolveFailed}) {
    if (s == ToString(st)) return st;
  }
  return std::nullopt;
}

DeploymentStats AggregateDeployment(const std::vector<OptionSupport>& results) {
  if (results.empty()) throw std::invalid_argument("no probe results");
  DeploymentStats s;
  size_t none = 0, all = 0, ws = 0, sack = 0, ecn = 0;
  for (const auto& r : results) {
    ++s.total;
    switch (r.status) {
      case ProbeStatus::kOk: ++s.ok; break;
      case ProbeStatus::kNoAnswer: ++s.no_answer; continue;
      case ProbeStatus::kRefused: ++s.refused; continue;
      case ProbeStatus::kResolveFailed: ++s.resolve_failed; continue;
    }
    ws += r.ws;
    sack += r.sack;
    ecn += r.ecn;
    const int n = r.ws + r.sack + r.ecn;
    none += n == 0;
    all += n == 3;
  }
  if (s.ok == 0) throw std::invalid_argument("no successful probes");
  const double d = static_cast<double>(s.ok);
  s.none = none / d;
  s.all_three = all / d;
  s.ws = ws / d;
  s.sack = sack / d;
  s.ecn = ecn / d;
  return s;
}

const std::vector<std::string>& ResultCsvHeader() {
  static const std::vector<std::string> h = {"domain", "ip",  "status", "ws",
                                             "ws_shift", "sack", "ecn"};
  return h;
}

void WriteResultsCsv(const std::filesystem::path& path, const std::vector<OptionSupport>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    const bool ok = r.status == ProbeStatus::kOk;
    auto flag = [&](bool b) { return ok ? std::string(b ? "1" : "0") : std::string(); };
    out.push_back({r.domain, r.resolved_ip ? r.resolved_ip->ToString() : "", ToString(r.status),
                   flag(r.ws), ok && r.ws ? std::to_string(r.ws_shift) : "", flag(r.sack),
                   flag(r.ecn)});
  }
  csv::WriteFile(path, ResultCsvHeader(), out);
}

std::vector<OptionSupport> ReadResultsCsv(const std::filesystem::path& path) {
  const auto t = csv::Table::ReadFile(path);
  std::vector<OptionSupport> out;
  for (size_t i = 0; i < t.size(); ++i) {
    OptionSupport r;
    r.domain = t.at(i, "domain");
    if (!t.at(i, "ip").empty()) {
      r.resolved_ip = IpAddress::Parse(t.at(i, "ip"));
      if (!r.resolved_ip) throw csv::CsvError(path.string() + ": bad ip on row " + std::to_string(i + 2));
    }
    const auto st = ParseProbeStatus(t.at(i, "status"));
    if (!st) throw csv::CsvError(path.string() + ": bad status on row " + std::to_string(i + 2));
    r.status = *st;
    r.ws = t.at(i, "ws") == "1";
    r.ws_shift = r.ws ? static_cast<uint8_t>(std::stoi(t.at(i, "ws_shift"))) : 0;
    r.sack = t.at(i, "sack") == "1";
    r.ecn = t.at(i, "ecn") == "1";
    out.push_back(std::move(r));
  }
  return out;
}

std::string StatsToJson(const DeploymentStats& s) {
  nlohmann::ordered_json j;
  j["total"] = s.total;
  j["status_counts"] = {{"OK", s.ok},
                        {"NoAnswer", s.no_answer},
                        {"Refused", s.refused},
                        {"ResolveFailed", s.resolve_failed}};
  j["share_none"] = s.none;
  j["share_all_three"] = s.all_three;
  j["share_ws"] = s.ws;
  j["share_sack"] = s.sack;
  j["share_ecn"] = s.ecn;
  return j.dump(2) + "\n";
}

}  // namespace optperf::scanner

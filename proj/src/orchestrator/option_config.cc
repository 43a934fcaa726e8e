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

#include "optperf/orchestrator/option_config.h"

#include <algorithm>
#include <cctype>
#include <set>

namespace optperf::orchestrator {
namespace {

std::string Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

bool ValidClientId(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

}  // namespace

OptionConfig OptionConfig::Named(std::string_view name) {
  OptionConfig c;
  c.name = std::string(name);
  if (name == "WARMUP" || name == "BL") return c;
  if (name == "ECN") {
    c.ecn = true;
  } else if (name == "SACK") {
    c.sack = true;
  } else if (name == "WS") {
    c.ws = true;
  } else if (name == "ALL") {
    c.ecn = c.sack = c.ws = true;
  } else if (name.rfind("QUIC:", 0) == 0 && ValidClientId(name.substr(5))) {
    return c;
  } else {
    throw MatrixError("unknown configuration '" + std::string(name) +
                      "' (expected WARMUP, BL, ECN, SACK, WS, ALL or QUIC:<client-id>)");
  }
  if (c.ws) c.ws_shift = kMaxWsShift;
  return c;
}

std::vector<OptionConfig> DefaultMatrix(const std::vector<std::string>& quic_clients) {
  std::vector<OptionConfig> m;
  for (const char* n : {"WARMUP", "BL", "ECN", "SACK", "WS", "ALL"}) m.push_back(OptionConfig::Named(n));
  for (const auto& id : quic_clients) m.push_back(OptionConfig::Named("QUIC:" + id));
  return m;
}

std::vector<OptionConfig> ParseMatrix(std::string_view text) {
  std::vector<OptionConfig> m;
  size_t i = 0;
  while (i <= text.size()) {
    size_t j = text.find(',', i);
    if (j == std::string_view::npos) j = text.size();
    const std::string item = Trim(text.substr(i, j - i));
    if (!item.empty()) m.push_back(OptionConfig::Named(item));
    i = j + 1;
  }
  ValidateMatrix(m);
  return m;
}

std::string FormatMatrix(const std::vector<OptionConfig>& matrix) {
  std::string s;
  for (const auto& c : matrix) {
    if (!s.empty()) s += ',';
    s += c.name;
  }
  return s;
}

void ValidateMatrix(const std::vector<OptionConfig>& matrix) {
  if (matrix.empty()) throw MatrixError("empty matrix");
  std::set<std::string> seen;
  bool quic_seen = false;
  for (size_t i = 0; i < matrix.size(); ++i) {
    const OptionConfig& c = matrix[i];
    if (!seen.insert(c.name).second) throw MatrixError("duplicate configuration " + c.name);
    if (c.is_warmup() && i != 0) throw MatrixError("WARMUP must be the first configuration");
    if (c.is_quic()) {
      quic_seen = true;
    } else if (quic_seen) {
      throw MatrixError("TCP configuration " + c.name + " follows a QUIC configuration");
    }
    if (c.ws_shift < 0 || c.ws_shift > kMaxWsShift) throw MatrixError(c.name + ": ws_shift out of range");
    if (!c.is_quic() && !(c == OptionConfig::Named(c.name))) {
      throw MatrixError(c.name + ": option flags do not match the configuration name");
    }
  }
}

}  // namespace optperf::orchestrator

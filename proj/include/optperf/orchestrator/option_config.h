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

#ifndef OPTPERF_ORCHESTRATOR_OPTION_CONFIG_H_
#define OPTPERF_ORCHESTRATOR_OPTION_CONFIG_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optperf::orchestrator {

class MatrixError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxWsShift = 14;

// One cell of the download matrix.
struct OptionConfig {
  std::string name;  // WARMUP, BL, ECN, SACK, WS, ALL or QUIC:<client-id>
  bool ecn = false;
  bool sack = false;
  bool ws = false;
  int ws_shift = 0;

  bool is_quic() const { return name.rfind("QUIC:", 0) == 0; }
  bool is_warmup() const { return name == "WARMUP"; }
  std::string quic_client() const { return is_quic() ? name.substr(5) : ""; }

  // Throws MatrixError for unknown names.
  static OptionConfig Named(std::string_view name);

  friend bool operator==(const OptionConfig&, const OptionConfig&) = default;
};

// WARMUP, BL, ECN, SACK, WS, ALL, then one QUIC entry per client id.
std::vector<OptionConfig> DefaultMatrix(const std::vector<std::string>& quic_clients = {});

// Comma-separated config names.
std::vector<OptionConfig> ParseMatrix(std::string_view text);
std::string FormatMatrix(const std::vector<OptionConfig>& matrix);

// Throws MatrixError unless: non-empty; no duplicates; WARMUP, when
// present, first; every TCP entry before every QUIC entry; the option
// flags match the name.
void ValidateMatrix(const std::vector<OptionConfig>& matrix);

}  // namespace optperf::orchestrator

#endif  // OPTPERF_ORCHESTRATOR_OPTION_CONFIG_H_

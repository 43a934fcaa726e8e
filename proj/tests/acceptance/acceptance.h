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

#ifndef OPTPERF_TESTS_ACCEPTANCE_ACCEPTANCE_H_
#define OPTPERF_TESTS_ACCEPTANCE_ACCEPTANCE_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace optperf::acceptance {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::function<Verdict()> run;
};

// Scratch directory for one criterion, emptied first.
std::filesystem::path Scratch(const std::string& name);
// Listening TCP socket in the calling thread's namespace. Throws on failure.
int ListenTcp(const std::string& ip, int port);

Verdict MetricsOracle();         // 1
Verdict RetransmissionCorpus();  // 2
Verdict RttExtraction();         // 3
Verdict ConfigFidelity();        // 4
Verdict DirectionalSpeedups();   // 5
Verdict BucketsAndCdf();         // 6
Verdict ScannerCombinations();   // 7
Verdict CrawlerPoliteness();     // 8
Verdict AttributionOracle();     // 9
Verdict EndToEndPipeline();      // 10

}  // namespace optperf::acceptance

#endif  // OPTPERF_TESTS_ACCEPTANCE_ACCEPTANCE_H_

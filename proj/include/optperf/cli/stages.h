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

#ifndef OPTPERF_CLI_STAGES_H_
#define OPTPERF_CLI_STAGES_H_

#include <iosfwd>

#include "optperf/cli/config.h"

namespace optperf::cli {

// Each stage reads the previous stage's files from out_dir and writes its
// own. Per-target failures are recorded in the outputs; a StageError means
// the stage itself could not complete. Dry runs print the planned network
// actions to `out` and write nothing.
void RunStage(Stage stage, const PipelineConfig& c, std::ostream& out);

// scan, crawl, download, analyze, attribute, report.
void RunPipeline(const PipelineConfig& c, std::ostream& out);

}  // namespace optperf::cli

#endif  // OPTPERF_CLI_STAGES_H_

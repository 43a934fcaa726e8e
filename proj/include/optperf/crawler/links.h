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

#ifndef OPTPERF_CRAWLER_LINKS_H_
#define OPTPERF_CRAWLER_LINKS_H_

#include <string>
#include <string_view>
#include <vector>

namespace optperf::crawler {

// href values of <a> elements in document order, entity-decoded and
// trimmed. Comments, scripts and javascript:/mailto: links are skipped.
std::vector<std::string> ExtractLinks(std::string_view html);

}  // namespace optperf::crawler

#endif  // OPTPERF_CRAWLER_LINKS_H_

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

#ifndef OPTPERF_COMMON_TOKEN_BUCKET_H_
#define OPTPERF_COMMON_TOKEN_BUCKET_H_

#include <chrono>
#include <mutex>

namespace optperf {

// Thread-safe token bucket. Acquire() blocks until a token is available.
// A rate of zero or less disables limiting.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;

  TokenBucket(double rate_per_second, double burst);

  void Acquire();
  bool TryAcquire();

  double rate() const { return rate_; }

 private:
  void RefillLocked(Clock::time_point now);

  const double rate_;
  const double burst_;
  std::mutex mu_;
  double tokens_;
  Clock::time_point last_;
};

}  // namespace optperf

#endif  // OPTPERF_COMMON_TOKEN_BUCKET_H_

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

#ifndef OPTPERF_COMMON_IP_ADDRESS_H_
#define OPTPERF_COMMON_IP_ADDRESS_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace optperf {

enum class IpFamily : uint8_t { kV4 = 4, kV6 = 6 };

// An IPv4 or IPv6 address. IPv4 addresses occupy the first four bytes of
// `bytes`; the remainder is zero so that ordering and hashing stay simple.
class IpAddress {
 public:
  IpAddress() = default;

  static IpAddress V4(uint32_t host_order);
  static IpAddress FromBytes(IpFamily family, std::span<const uint8_t> bytes);
  static std::optional<IpAddress> Parse(std::string_view text);

  IpFamily family() const { return family_; }
  bool is_v4() const { return family_ == IpFamily::kV4; }
  size_t size() const { return is_v4() ? 4 : 16; }
  std::span<const uint8_t> bytes() const { return {bytes_.data(), size()}; }
  uint32_t v4_host_order() const;

  // Value of bit `index` counted from the most significant bit.
  bool bit(int index) const {
    return (bytes_[index / 8] >> (7 - index % 8)) & 1;
  }
  int bit_length() const { return is_v4() ? 32 : 128; }

  std::string ToString() const;

  friend auto operator<=>(const IpAddress&, const IpAddress&) = default;
  friend bool operator==(const IpAddress&, const IpAddress&) = default;

 private:
  IpFamily family_ = IpFamily::kV4;
  std::array<uint8_t, 16> bytes_{};
};

struct Endpoint {
  IpAddress address;
  uint16_t port = 0;

  std::string ToString() const;
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

}  // namespace optperf

#endif  // OPTPERF_COMMON_IP_ADDRESS_H_

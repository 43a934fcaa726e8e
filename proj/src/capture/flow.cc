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

#include "optperf/capture/flow.h"

#include <algorithm>
#include <map>

namespace optperf::capture {
namespace {

AdvertisedOptions AdvertisedFrom(const PacketRecord& p) {
  AdvertisedOptions a;
  a.window_scale = p.tcp_options.window_scale;
  a.sack_permitted = p.tcp_options.sack_permitted;
  a.timestamps = p.tcp_options.timestamp.has_value();
  a.mss = p.tcp_options.mss;
  return a;
}

bool IsPureSyn(const PacketRecord& p) {
  return p.is_tcp() && p.has_flag(tcp_flags::kSyn) && !p.has_flag(tcp_flags::kAck);
}

bool IsSynAck(const PacketRecord& p) {
  return p.is_tcp() && p.has_flag(tcp_flags::kSyn) && p.has_flag(tcp_flags::kAck);
}

struct FlowState {
  Flow flow;
  bool closed = false;
  bool syn_ecn_setup = false;
};

}  // namespace

FlowKey FlowKey::Of(const PacketRecord& p) {
  FlowKey k;
  k.transport = p.transport;
  if (p.src < p.dst) {
    k.low = p.src;
    k.high = p.dst;
  } else {
    k.low = p.dst;
    k.high = p.src;
  }
  return k;
}

std::vector<Flow> DemuxFlows(std::vector<PacketRecord> packets) {
  if (!std::is_sorted(packets.begin(), packets.end(),
                      [](const auto& a, const auto& b) {
                        return a.timestamp_us < b.timestamp_us;
                      })) {
    std::stable_sort(packets.begin(), packets.end(), [](const auto& a, const auto& b) {
      return a.timestamp_us < b.timestamp_us;
    });
  }

  std::vector<FlowState> states;
  std::map<FlowKey, size_t> current;
  for (auto& p : packets) {
    const FlowKey key = FlowKey::Of(p);
    auto it = current.find(key);
    const bool reopen = it != current.end() && IsPureSyn(p) && states[it->second].closed;
    if (it == current.end() || reopen) {
      FlowState st;
      st.flow.key = key;
      if (IsSynAck(p)) {
        st.flow.initiator = p.dst;
        st.flow.responder = p.src;
      } else {
        st.flow.initiator = p.src;
        st.flow.responder = p.dst;
      }
      states.push_back(std::move(st));
      current[key] = states.size() - 1;
      it = current.find(key);
    }
    FlowState& st = states[it->second];
    Flow& f = st.flow;
    if (IsPureSyn(p) && p.src == f.initiator && !f.negotiated.syn_seen) {
      f.negotiated.syn_seen = true;
      f.negotiated.initiator = AdvertisedFrom(p);
      st.syn_ecn_setup = p.has_flag(tcp_flags::kEce) && p.has_flag(tcp_flags::kCwr);
      f.handshake_observed = true;
    } else if (IsSynAck(p) && p.src == f.responder && !f.negotiated.syn_ack_seen) {
      f.negotiated.syn_ack_seen = true;
      f.negotiated.responder = AdvertisedFrom(p);
      f.negotiated.ecn = st.syn_ecn_setup && p.has_flag(tcp_flags::kEce) &&
                         !p.has_flag(tcp_flags::kCwr);
    }
    if (p.is_tcp() && (p.has_flag(tcp_flags::kFin) || p.has_flag(tcp_flags::kRst))) {
      st.closed = true;
    }
    f.packets.push_back(std::move(p));
  }

  std::vector<Flow> flows;
  flows.reserve(states.size());
  for (auto& st : states) flows.push_back(std::move(st.flow));
  return flows;
}

}  // namespace optperf::capture

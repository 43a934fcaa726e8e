#!/usr/bin/env python3
# Copyright 2026 The optperf Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes tests/data/cdn/rib.mrt, a small TABLE_DUMP_V2 RIB dump.

Encoded by hand with struct so that the C++ MRT reader is checked against
an independent writer. Expected origins are listed in EXPECTED below and
asserted by the unit tests.
"""

import ipaddress
import os
import struct

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "cdn", "rib.mrt")
TS = 1700000000

EXPECTED = {
    "192.0.2.0/24": [64500],
    "198.51.100.0/24": [64501, 64502],
    "10.0.0.0/8": [64510, 64511],
    "2001:db8::/32": [64520],
    "203.0.113.0/25": [64530],
}


def record(subtype, body):
    return struct.pack(">IHHI", TS, 13, subtype, len(body)) + body


def peer_index():
    peers = [(0b10, "192.0.2.254", 64496), (0b11, "2001:db8::fe", 64497)]
    out = struct.pack(">I", 0x0a0a0a0a) + struct.pack(">H", 4) + b"test"
    out += struct.pack(">H", len(peers))
    for ptype, ip, asn in peers:
        addr = ipaddress.ip_address(ip).packed
        out += struct.pack(">BI", ptype, 0x01010101) + addr + struct.pack(">I", asn)
    return record(1, out)


def as_path(segments, extended=False):
    value = b""
    for seg_type, asns in segments:
        value += struct.pack(">BB", seg_type, len(asns))
        value += b"".join(struct.pack(">I", a) for a in asns)
    if extended:
        return struct.pack(">BBH", 0x50, 2, len(value)) + value
    return struct.pack(">BBB", 0x40, 2, len(value)) + value


ORIGIN_ATTR = struct.pack(">BBBB", 0x40, 1, 1, 0)


def rib(subtype, seq, prefix, entries, add_path=False):
    net = ipaddress.ip_network(prefix)
    nbytes = (net.prefixlen + 7) // 8
    body = struct.pack(">IB", seq, net.prefixlen) + net.network_address.packed[:nbytes]
    body += struct.pack(">H", len(entries))
    for peer, attrs in entries:
        body += struct.pack(">HI", peer, TS - 100)
        if add_path:
            body += struct.pack(">I", 7)
        body += struct.pack(">H", len(attrs)) + attrs
    return record(subtype, body)


def main():
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    data = peer_index()
    data += rib(2, 0, "192.0.2.0/24",
                [(0, ORIGIN_ATTR + as_path([(2, [64496, 64500])]))])
    data += rib(2, 1, "198.51.100.0/24",
                [(0, ORIGIN_ATTR + as_path([(2, [64496]), (1, [64502, 64501])],
                                           extended=True))])
    data += rib(2, 2, "10.0.0.0/8",
                [(0, ORIGIN_ATTR + as_path([(2, [64496, 64510])])),
                 (1, as_path([(2, [64497, 64511])]))])
    data += rib(4, 3, "2001:db8::/32",
                [(1, ORIGIN_ATTR + as_path([(2, [64497, 64520])]))])
    data += rib(8, 4, "203.0.113.0/25",
                [(0, as_path([(2, [64496, 64530])]))], add_path=True)
    # Attribute length runs past the record: skipped by the reader.
    bad = rib(2, 5, "100.64.0.0/10", [(0, as_path([(2, [64496, 64540])]))])
    bad = bad[:12] + bad[12:-2]
    data += struct.pack(">IHHI", TS, 13, 2, len(bad) - 12) + bad[12:]
    # A record of another MRT type is ignored.
    data += struct.pack(">IHHI", TS, 16, 4, 4) + b"\0\0\0\0"
    with open(OUT, "wb") as f:
        f.write(data)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
# Copyright 2026 The optperf Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the retransmission corpus under tests/data/retx.

Twelve server-side captures of a download (server 10.0.0.2:443, client
10.0.0.1:40000, 1000-byte segments), each with hand-assigned labels for the
frames that are not ordinary traffic. Frame numbers are 1-based as in
Wireshark. labels.json maps capture name to {frame: label}.

    python3 tests/fixtures/gen_retx_corpus.py
"""

import json
import os

from scapy.all import IP, TCP, Ether, Raw, wrpcap

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "retx")
CLIENT, SERVER = "10.0.0.1", "10.0.0.2"
CPORT, SPORT = 40000, 443
C_ISN, S_ISN = 5000, 1000
MSS = 1000
REQ = 100


class Conv:
    def __init__(self):
        self.frames = []
        self.labels = {}
        self.t = 1_700_000_000.0

    def add(self, dt, from_server, flags, seq, ack, n=0, label=None):
        self.t += dt
        src, dst = (SERVER, CLIENT) if from_server else (CLIENT, SERVER)
        sp, dp = (SPORT, CPORT) if from_server else (CPORT, SPORT)
        pkt = Ether() / IP(src=src, dst=dst) / TCP(
            sport=sp, dport=dp, flags=flags, seq=seq, ack=ack, window=65535)
        if n:
            pkt = pkt / Raw(b"\x00" * n)
        pkt.time = self.t
        self.frames.append(pkt)
        if label:
            self.labels[str(len(self.frames))] = label

    def handshake(self):
        self.add(0, False, "S", C_ISN, 0)
        self.add(0.05, True, "SA", S_ISN, C_ISN + 1)
        self.add(0.05, False, "A", C_ISN + 1, S_ISN + 1)
        self.add(0.001, False, "PA", C_ISN + 1, S_ISN + 1, REQ)

    def seg(self, k, dt=0.001, label=None, n=MSS, offset=0):
        """Server segment k (1-based) of the body."""
        self.add(dt, True, "A", S_ISN + 1 + (k - 1) * MSS + offset,
                 C_ISN + 1 + REQ, n, label)

    def ack(self, k, dt=0.001):
        """Client ACK covering k segments."""
        self.add(dt, False, "A", C_ISN + 1 + REQ, S_ISN + 1 + k * MSS)

    def keepalive(self, k, dt, label="KeepAlive"):
        """One garbage byte just below the next sequence number after k segments."""
        self.add(dt, True, "A", S_ISN + k * MSS, C_ISN + 1 + REQ, 1, label)

    def fin(self, k):
        self.add(0.001, True, "FA", S_ISN + 1 + k * MSS, C_ISN + 1 + REQ)
        self.add(0.05, False, "FA", C_ISN + 1 + REQ, S_ISN + 2 + k * MSS)
        self.add(0.05, True, "A", S_ISN + 2 + k * MSS, C_ISN + 2 + REQ)

    def loss_event(self, lost, sent_after, resend_dt, label):
        """Segment `lost` is acked around three times; each later segment
        draws a duplicate ACK; then `lost` goes out again."""
        for k in range(lost + 1, lost + 1 + sent_after):
            self.seg(k)
            self.ack(lost - 1)
        self.seg(lost, resend_dt, label)


def clean():
    c = Conv()
    c.handshake()
    for k in range(1, 6):
        c.seg(k)
        if k % 2 == 0:
            c.ack(k)
    c.ack(5)
    c.fin(5)
    return c


def plain_retransmit():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.seg(3)
    c.seg(4)
    c.seg(3, 0.3, "Retransmission")
    c.ack(4)
    c.fin(4)
    return c


def fast_retransmit():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.seg(3)
    c.loss_event(3, 3, 0.005, "FastRetransmission")
    c.ack(6)
    c.fin(6)
    return c


def late_retransmit():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.seg(3)
    c.loss_event(3, 3, 0.5, "Retransmission")
    c.ack(6)
    c.fin(6)
    return c


def spurious():
    c = Conv()
    c.handshake()
    for k in range(1, 5):
        c.seg(k)
    c.ack(4)
    c.seg(2, 0.2, "Spurious")
    c.fin(4)
    return c


def keepalive():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.keepalive(2, 10.0)
    c.ack(2)
    c.fin(2)
    return c


def fast_then_spurious():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.seg(3)
    c.loss_event(3, 3, 0.004, "FastRetransmission")
    c.ack(6)
    c.seg(3, 0.05, "Spurious")
    c.fin(6)
    return c


def plain_and_keepalive():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.seg(3)
    c.seg(3, 0.25, "Retransmission")
    c.ack(3)
    c.keepalive(3, 15.0)
    c.ack(3)
    c.fin(3)
    return c


def repacketized_overlap():
    c = Conv()
    c.handshake()
    for k in range(1, 5):
        c.seg(k)
    c.ack(1)
    # 1000 bytes starting halfway into segment 2.
    c.seg(2, 0.3, "Retransmission", offset=MSS // 2)
    c.ack(4)
    c.fin(4)
    return c


def two_fast():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.seg(3)
    c.loss_event(3, 3, 0.003, "FastRetransmission")
    c.ack(6)
    c.seg(7)
    c.loss_event(7, 4, 0.010, "FastRetransmission")
    c.ack(11)
    c.fin(11)
    return c


def client_retransmit():
    c = Conv()
    c.add(0, False, "S", C_ISN, 0)
    c.add(0.05, True, "SA", S_ISN, C_ISN + 1)
    c.add(0.05, False, "A", C_ISN + 1, S_ISN + 1)
    c.add(0.001, False, "PA", C_ISN + 1, S_ISN + 1, REQ)
    c.add(0.2, False, "PA", C_ISN + 1, S_ISN + 1, REQ, "Retransmission")
    c.seg(1, 0.05)
    c.ack(1)
    c.fin(1)
    return c


def mixed():
    c = Conv()
    c.handshake()
    c.seg(1)
    c.seg(2)
    c.ack(2)
    c.seg(3)
    c.loss_event(3, 3, 0.002, "FastRetransmission")
    c.ack(6)
    c.seg(7)
    c.seg(8)
    c.ack(7)
    c.seg(8, 0.6, "Retransmission")
    c.ack(8)
    c.seg(5, 0.02, "Spurious")
    c.keepalive(8, 20.0)
    c.ack(8)
    c.fin(8)
    return c


CORPUS = {
    "01_clean.pcap": clean,
    "02_plain_retransmit.pcap": plain_retransmit,
    "03_fast_retransmit.pcap": fast_retransmit,
    "04_late_retransmit.pcap": late_retransmit,
    "05_spurious.pcap": spurious,
    "06_keepalive.pcap": keepalive,
    "07_fast_then_spurious.pcap": fast_then_spurious,
    "08_plain_and_keepalive.pcap": plain_and_keepalive,
    "09_repacketized_overlap.pcap": repacketized_overlap,
    "10_two_fast.pcap": two_fast,
    "11_client_retransmit.pcap": client_retransmit,
    "12_mixed.pcap": mixed,
}


def main():
    os.makedirs(OUT, exist_ok=True)
    labels = {}
    for name, build in CORPUS.items():
        conv = build()
        wrpcap(os.path.join(OUT, name), conv.frames)
        labels[name] = conv.labels
    with open(os.path.join(OUT, "labels.json"), "w") as f:
        json.dump(labels, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()

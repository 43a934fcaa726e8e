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
"""Minimal HTTP/3 fixture server: serves generated bodies of fixed sizes.

  h3_server.py --cert C --key K --address A --port P --file /path=SIZE ...
                [--ready-file F]

Unknown paths get 404. The ready file is created once the socket is bound.
"""

import argparse
import asyncio

from aioquic.asyncio import serve
from aioquic.asyncio.protocol import QuicConnectionProtocol
from aioquic.h3.connection import H3_ALPN, H3Connection
from aioquic.h3.events import HeadersReceived
from aioquic.quic.configuration import QuicConfiguration
from aioquic.quic.events import ProtocolNegotiated

FILES = {}
CHUNK = 64 * 1024


def body(size):
    pattern = bytes(range(256)) * (CHUNK // 256)
    out = bytearray()
    while len(out) < size:
        out += pattern[: size - len(out)]
    return bytes(out)


class Server(QuicConnectionProtocol):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.http = None

    def quic_event_received(self, event):
        if isinstance(event, ProtocolNegotiated):
            self.http = H3Connection(self._quic)
        if self.http is None:
            return
        for ev in self.http.handle_event(event):
            if isinstance(ev, HeadersReceived):
                path = dict(ev.headers).get(b":path", b"/").decode().split("?")[0]
                data = FILES.get(path)
                if data is None:
                    self.http.send_headers(ev.stream_id, [(b":status", b"404"), (b"content-length", b"0")],
                                           end_stream=True)
                else:
                    self.http.send_headers(
                        ev.stream_id,
                        [(b":status", b"200"), (b"content-type", b"application/octet-stream"),
                         (b"content-length", str(len(data)).encode())])
                    self.http.send_data(ev.stream_id, data, end_stream=True)
                self.transmit()


async def main():
    p = argparse.ArgumentParser()
    p.add_argument("--cert", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--address", default="::")
    p.add_argument("--port", type=int, default=443)
    p.add_argument("--file", action="append", default=[], help="/path=SIZE")
    p.add_argument("--ready-file")
    args = p.parse_args()
    for spec in args.file:
        path, size = spec.rsplit("=", 1)
        FILES[path] = body(int(size))
    config = QuicConfiguration(is_client=False, alpn_protocols=H3_ALPN,
                               max_stream_data=4 << 20, max_data=16 << 20)
    config.load_cert_chain(args.cert, args.key)
    await serve(args.address, args.port, configuration=config, create_protocol=Server)
    if args.ready_file:
        open(args.ready_file, "w").close()
    await asyncio.Future()


if __name__ == "__main__":
    asyncio.run(main())

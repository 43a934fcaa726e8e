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
"""HTTP/3 GET over aioquic, as a QUIC client adapter for optperf download.

Connects to IP:PORT, presents the URL's host for SNI and :authority, and
writes the response body to OUTPUT.

Exit status:
  0  2xx response, body written
  1  no response (handshake failure, timeout before headers); OUTPUT absent
  2  response other than 2xx, or the transfer broke; OUTPUT holds what arrived
"""

import argparse
import asyncio
import os
import ssl
import sys
from urllib.parse import urlsplit

from aioquic.asyncio import connect
from aioquic.asyncio.protocol import QuicConnectionProtocol
from aioquic.h3.connection import H3_ALPN, H3Connection
from aioquic.h3.events import DataReceived, HeadersReceived
from aioquic.quic.configuration import QuicConfiguration
from aioquic.quic.events import ConnectionTerminated


class Client(QuicConnectionProtocol):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.http = H3Connection(self._quic)
        self.status = None
        self.sink = None
        self.received = 0
        self.done = asyncio.get_event_loop().create_future()

    def quic_event_received(self, event):
        if isinstance(event, ConnectionTerminated) and not self.done.done():
            self.done.set_exception(ConnectionError(event.reason_phrase or "connection closed"))
        for ev in self.http.handle_event(event):
            if isinstance(ev, HeadersReceived):
                for k, v in ev.headers:
                    if k == b":status":
                        self.status = int(v)
                if ev.stream_ended and not self.done.done():
                    self.done.set_result(None)
            elif isinstance(ev, DataReceived):
                self.sink.write(ev.data)
                self.received += len(ev.data)
                if ev.stream_ended and not self.done.done():
                    self.done.set_result(None)

    def get(self, authority, path, user_agent):
        stream_id = self._quic.get_next_available_stream_id()
        self.http.send_headers(
            stream_id,
            [
                (b":method", b"GET"),
                (b":scheme", b"https"),
                (b":authority", authority.encode()),
                (b":path", path.encode()),
                (b"user-agent", user_agent.encode()),
            ],
            end_stream=True,
        )
        self.transmit()


async def run(args):
    url = urlsplit(args.url)
    host = url.hostname
    port = args.port or url.port or 443
    config = QuicConfiguration(is_client=True, alpn_protocols=H3_ALPN, server_name=host)
    if args.insecure:
        config.verify_mode = ssl.CERT_NONE
    elif args.ca_file:
        config.load_verify_locations(args.ca_file)
    path = url.path or "/"
    if url.query:
        path += "?" + url.query
    authority = host if port == 443 else f"{host}:{port}"
    try:
        async with connect(args.ip, port, configuration=config, create_protocol=Client,
                           wait_connected=True) as client:
            with open(args.output, "wb") as sink:
                client.sink = sink
                client.get(authority, path, args.user_agent)
                try:
                    await client.done
                except ConnectionError as e:
                    print(f"transfer broke after {client.received} bytes: {e}", file=sys.stderr)
                    return 2
            if client.status is None or not 200 <= client.status < 300:
                print(f"HTTP status {client.status}", file=sys.stderr)
                return 2
            return 0
    except (ConnectionError, OSError, asyncio.TimeoutError) as e:
        print(f"no response: {e!r}", file=sys.stderr)
        return 1


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("url")
    p.add_argument("ip")
    p.add_argument("output")
    p.add_argument("--port", type=int, default=0, help="default: the URL's port, else 443")
    p.add_argument("--ca-file", help="PEM bundle to verify the server against")
    p.add_argument("--insecure", action="store_true", help="skip certificate verification")
    p.add_argument("--user-agent", default="optperf-research")
    p.add_argument("--timeout", type=float, default=300.0)
    args = p.parse_args()
    try:
        status = asyncio.run(asyncio.wait_for(run(args), args.timeout))
    except asyncio.TimeoutError:
        status = 2 if os.path.exists(args.output) else 1
        print("timed out", file=sys.stderr)
    if status == 1 and os.path.exists(args.output) and os.path.getsize(args.output) == 0:
        os.remove(args.output)
    sys.exit(status)


if __name__ == "__main__":
    main()

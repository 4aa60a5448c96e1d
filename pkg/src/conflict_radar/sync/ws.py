"""Dashboard bridge: WebSocket fan-out plus a small HTTP surface.

Serves on the relay port + 1. `GET /ws` upgrades to a WebSocket that
immediately receives WELCOME and the current CONFLICTS, then every
Broadcast/Revert/Conflicts the relay emits. `POST /actions` appends a
prompt-choice record to the session log; `GET /actions` returns it.
Anything else is served from the static asset directory when one is
configured. The WebSocket side is a hand-rolled server half of RFC
6455: text frames only, client frames must be masked, ping answered
with pong.
"""

from __future__ import annotations

import base64
import hashlib
import json
import queue
import struct
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import BinaryIO, Optional

from .protocol import WireMessage, encode_message
from .server import RelayServer

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


def websocket_accept(key: str) -> str:
    digest = hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def encode_text_frame(payload: bytes) -> bytes:
    """Server-to-client text frame; server frames are never masked."""
    header = bytearray([0x81])
    n = len(payload)
    if n < 126:
        header.append(n)
    elif n < 1 << 16:
        header.append(126)
        header += struct.pack(">H", n)
    else:
        header.append(127)
        header += struct.pack(">Q", n)
    return bytes(header) + payload


def read_frame(rfile: BinaryIO) -> tuple[int, bytes]:
    """Read one client frame; returns (opcode, unmasked payload)."""
    head = _read_exact(rfile, 2)
    opcode = head[0] & 0x0F
    masked = head[1] & 0x80
    length = head[1] & 0x7F
    if length == 126:
        (length,) = struct.unpack(">H", _read_exact(rfile, 2))
    elif length == 127:
        (length,) = struct.unpack(">Q", _read_exact(rfile, 8))
    if not masked:
        raise ConnectionError("client frames must be masked")
    mask = _read_exact(rfile, 4)
    payload = bytearray(_read_exact(rfile, length))
    for i in range(length):
        payload[i] ^= mask[i % 4]
    return opcode, bytes(payload)


def _read_exact(rfile: BinaryIO, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = rfile.read(n - len(buf))
        if not chunk:
            raise ConnectionError("peer closed mid-frame")
        buf += chunk
    return buf


class DashboardBridge:
    """HTTP + WebSocket shell wired to one RelayServer."""

    def __init__(self, relay: RelayServer, host: str = "127.0.0.1",
                 port: Optional[int] = None, static_dir: Optional[Path] = None):
        self.relay = relay
        self.host = host
        self.port = port if port is not None else relay.port + 1
        self.static_dir = Path(static_dir) if static_dir is not None else None
        self.actions: list[dict] = []
        self.actions_lock = threading.Lock()
        self._httpd: Optional[ThreadingHTTPServer] = None
        self._thread: Optional[threading.Thread] = None

    def start(self) -> int:
        bridge = self

        class Handler(_DashboardHandler):
            pass

        Handler.bridge = bridge
        self._httpd = ThreadingHTTPServer((self.host, self.port), Handler)
        self._httpd.daemon_threads = True
        self.port = self._httpd.server_address[1]
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, name="radar-dash", daemon=True
        )
        self._thread.start()
        return self.port

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=2)

    def record_action(self, record: dict) -> None:
        with self.actions_lock:
            self.actions.append(record)

    def action_log(self) -> list[dict]:
        with self.actions_lock:
            return list(self.actions)


class _DashboardHandler(BaseHTTPRequestHandler):
    bridge: DashboardBridge
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # silence per-request noise
        pass

    def do_GET(self):
        if self.path == "/ws":
            self._serve_websocket()
        elif self.path == "/actions":
            body = json.dumps(self.bridge.action_log()).encode("utf-8")
            self._reply(200, body, "application/json")
        else:
            self._serve_static()

    def do_POST(self):
        if self.path != "/actions":
            self._reply(404, b"not found", "text/plain; charset=utf-8")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            record = json.loads(self.rfile.read(length))
            if not isinstance(record, dict):
                raise ValueError("body must be a JSON object")
            missing = {"member", "pathId", "action"} - set(record)
            if missing:
                raise ValueError(f"missing fields: {sorted(missing)}")
        except (ValueError, json.JSONDecodeError) as exc:
            self._reply(400, str(exc).encode("utf-8"), "text/plain; charset=utf-8")
            return
        self.bridge.record_action(record)
        self._reply(204, b"", "text/plain")

    # -- websocket ---------------------------------------------------

    def _serve_websocket(self):
        key = self.headers.get("Sec-WebSocket-Key")
        upgrade = (self.headers.get("Upgrade") or "").lower()
        if upgrade != "websocket" or not key:
            self._reply(400, b"websocket upgrade required", "text/plain; charset=utf-8")
            return
        self.send_response(101, "Switching Protocols")
        self.send_header("Upgrade", "websocket")
        self.send_header("Connection", "Upgrade")
        self.send_header("Sec-WebSocket-Accept", websocket_accept(key))
        self.end_headers()
        self.close_connection = True

        outbox: "queue.Queue[Optional[str]]" = queue.Queue()

        def observer(msg: WireMessage) -> None:
            outbox.put(encode_message(msg))

        relay = self.bridge.relay
        outbox.put(encode_message(relay.welcome_for_observer()))
        outbox.put(encode_message(relay.conflicts_now()))
        relay.add_observer(observer)

        writer = threading.Thread(
            target=self._ws_writer, args=(outbox,), name="radar-ws-out", daemon=True
        )
        writer.start()
        try:
            while True:
                opcode, payload = read_frame(self.rfile)
                if opcode == 0x8:  # close
                    break
                if opcode == 0x9:  # ping -> pong
                    frame = bytes([0x8A, len(payload)]) + payload
                    self.connection.sendall(frame)
                # Inbound text is ignored: the dashboard feed is one-way;
                # actions arrive over POST /actions instead.
        except (ConnectionError, OSError):
            pass
        finally:
            relay.remove_observer(observer)
            outbox.put(None)

    def _ws_writer(self, outbox: "queue.Queue[Optional[str]]") -> None:
        while True:
            line = outbox.get()
            if line is None:
                return
            try:
                self.connection.sendall(encode_text_frame(line.encode("utf-8")))
            except OSError:
                return

    # -- plain http --------------------------------------------------

    def _serve_static(self):
        root = self.bridge.static_dir
        if root is None:
            self._reply(404, b"no dashboard assets configured", "text/plain; charset=utf-8")
            return
        name = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (root / name).resolve()
        # Containment check: never serve outside the asset directory.
        if not str(target).startswith(str(root.resolve())) or not target.is_file():
            self._reply(404, b"not found", "text/plain; charset=utf-8")
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._reply(200, target.read_bytes(), ctype)

    def _reply(self, status: int, body: bytes, ctype: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if body:
            self.wfile.write(body)

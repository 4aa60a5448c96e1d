"""Dashboard bridge: WebSocket handshake, frames, /actions, static files."""

import base64
import http.client
import json
import os
import socket
import struct
import threading
import time

import pytest

from conflict_radar.distill import extract_changes
from conflict_radar.sync.protocol import decode_message
from conflict_radar.sync.server import RelayServer
from conflict_radar.sync.ws import DashboardBridge, encode_text_frame, websocket_accept
from conflict_radar.syntax.parser import parse_unit

from test_sync_tcp import RawMember, delta_between, BASE_SRC


def test_accept_key_matches_rfc6455_example():
    # Independent oracle: the worked example from RFC 6455 section 1.3.
    assert websocket_accept("dGhlIHNhbXBsZSBub25jZQ==") == "s3pPLMBiTxaQ9kYGzzhZRbK+xOo="


def test_text_frame_length_encodings():
    short = encode_text_frame(b"a" * 10)
    assert short[0] == 0x81 and short[1] == 10
    medium = encode_text_frame(b"a" * 300)
    assert medium[1] == 126
    assert struct.unpack(">H", medium[2:4])[0] == 300
    large = encode_text_frame(b"a" * 70000)
    assert large[1] == 127
    assert struct.unpack(">Q", large[2:10])[0] == 70000


@pytest.fixture
def stack():
    relay = RelayServer(port=0)
    relay.start()
    bridge = DashboardBridge(relay, port=0)
    bridge.start()
    yield relay, bridge
    bridge.stop()
    relay.stop()


class WsProbe:
    """Minimal browser stand-in: handshake plus frame reader."""

    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=5)
        key = base64.b64encode(os.urandom(16)).decode("ascii")
        request = (
            f"GET /ws HTTP/1.1\r\nHost: 127.0.0.1:{port}\r\n"
            "Upgrade: websocket\r\nConnection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\nSec-WebSocket-Version: 13\r\n\r\n"
        )
        self.sock.sendall(request.encode("ascii"))
        self.reader = self.sock.makefile("rb")
        status = self.reader.readline()
        assert b"101" in status, status
        accept = None
        while True:
            line = self.reader.readline()
            if line in (b"\r\n", b""):
                break
            name, _, value = line.decode("ascii").partition(":")
            if name.lower() == "sec-websocket-accept":
                accept = value.strip()
        assert accept == websocket_accept(key)

    def read_message(self, timeout=5.0):
        self.sock.settimeout(timeout)
        head = self.reader.read(2)
        assert len(head) == 2, "connection closed"
        opcode = head[0] & 0x0F
        length = head[1] & 0x7F
        if length == 126:
            (length,) = struct.unpack(">H", self.reader.read(2))
        elif length == 127:
            (length,) = struct.unpack(">Q", self.reader.read(8))
        payload = self.reader.read(length)
        return opcode, payload

    def wait_for_type(self, wanted, timeout=5.0):
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            opcode, payload = self.read_message(timeout=deadline - time.monotonic())
            if opcode != 0x1:
                continue
            msg = decode_message(payload.decode("utf-8"))
            if msg.TYPE == wanted:
                return msg
        raise AssertionError(f"no {wanted} frame arrived")

    def send_masked(self, opcode, payload=b""):
        mask = os.urandom(4)
        masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        assert len(payload) < 126
        self.sock.sendall(bytes([0x80 | opcode, 0x80 | len(payload)]) + mask + masked)

    def close(self):
        try:
            self.send_masked(0x8)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


def test_dashboard_gets_welcome_then_live_feed(stack):
    relay, bridge = stack
    probe = WsProbe(bridge.port)
    welcome = probe.wait_for_type("WELCOME")
    assert welcome.session_id == relay.session.session_id
    probe.wait_for_type("CONFLICTS")

    member = RawMember(relay.port, "ana")
    member.send_raw(b"")  # no-op; HELLO already sent by RawMember
    from conflict_radar.sync.protocol import Publish, Welcome

    assert member.wait_for(Welcome)
    member.send(Publish(delta_between(BASE_SRC, BASE_SRC.replace("x = 0", "x = 1"), "ana")))

    broadcast = probe.wait_for_type("BROADCAST")
    assert broadcast.author == "ana"
    conflicts = probe.wait_for_type("CONFLICTS")
    assert "ana" in conflicts.reports
    probe.close()
    member.close()


def test_ping_answered_with_pong(stack):
    _, bridge = stack
    probe = WsProbe(bridge.port)
    probe.wait_for_type("WELCOME")
    probe.send_masked(0x9, b"hi")
    deadline = time.monotonic() + 5
    while time.monotonic() < deadline:
        opcode, payload = probe.read_message()
        if opcode == 0xA:
            assert payload == b"hi"
            break
    else:
        raise AssertionError("no pong")
    probe.close()


def test_plain_get_on_ws_path_is_rejected(stack):
    _, bridge = stack
    conn = http.client.HTTPConnection("127.0.0.1", bridge.port, timeout=5)
    conn.request("GET", "/ws")
    assert conn.getresponse().status == 400
    conn.close()


def test_actions_roundtrip(stack):
    _, bridge = stack
    record = {"member": "ana", "pathId": "Demo/C.java/C/m", "action": "Talk to your teammate", "atMillis": 12}
    conn = http.client.HTTPConnection("127.0.0.1", bridge.port, timeout=5)
    conn.request("POST", "/actions", json.dumps(record), {"Content-Type": "application/json"})
    response = conn.getresponse()
    assert response.status == 204
    response.read()

    conn.request("GET", "/actions")
    response = conn.getresponse()
    assert response.status == 200
    assert json.loads(response.read()) == [record]
    conn.close()


def test_actions_rejects_bad_payloads(stack):
    _, bridge = stack
    conn = http.client.HTTPConnection("127.0.0.1", bridge.port, timeout=5)
    conn.request("POST", "/actions", "not json", {"Content-Type": "application/json"})
    response = conn.getresponse()
    assert response.status == 400
    response.read()

    conn.request("POST", "/actions", json.dumps({"member": "ana"}), {"Content-Type": "application/json"})
    response = conn.getresponse()
    assert response.status == 400
    assert b"pathId" in response.read()
    conn.close()


def test_static_assets_served_with_containment(stack, tmp_path):
    relay, _ = stack
    (tmp_path / "index.html").write_text("<html>radar</html>")
    (tmp_path / "app.js").write_text("console.log(1)")
    bridge = DashboardBridge(relay, port=0, static_dir=tmp_path)
    bridge.start()
    try:
        conn = http.client.HTTPConnection("127.0.0.1", bridge.port, timeout=5)
        conn.request("GET", "/")
        response = conn.getresponse()
        assert response.status == 200
        assert b"radar" in response.read()

        conn.request("GET", "/app.js")
        response = conn.getresponse()
        assert response.status == 200
        assert response.getheader("Content-Type").startswith("text/javascript")
        response.read()

        conn.request("GET", "/../secret.txt")
        response = conn.getresponse()
        assert response.status == 404
        response.read()
        conn.close()
    finally:
        bridge.stop()


def test_no_static_dir_is_a_404_but_ws_still_works(stack):
    _, bridge = stack
    conn = http.client.HTTPConnection("127.0.0.1", bridge.port, timeout=5)
    conn.request("GET", "/")
    assert conn.getresponse().status == 404
    conn.close()
    probe = WsProbe(bridge.port)
    probe.wait_for_type("WELCOME")
    probe.close()

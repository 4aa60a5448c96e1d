"""Relay server and workspace client exchanging consolidated ChangeSets."""

from .client import BACKOFF_BASE, BACKOFF_CAP, ClientCore, RelayClient, backoff_delay
from .protocol import (
    Broadcast,
    Bye,
    Conflicts,
    Hello,
    MemberSnapshot,
    ProtocolDecodeError,
    ProtocolError,
    Publish,
    Rejected,
    Revert,
    Welcome,
    WireMessage,
    decode_message,
    encode_message,
)
from .server import DEFAULT_PORT, RelayServer, RelaySession
from .ws import DashboardBridge, encode_text_frame, read_frame, websocket_accept

__all__ = [
    "BACKOFF_BASE",
    "BACKOFF_CAP",
    "Broadcast",
    "Bye",
    "ClientCore",
    "Conflicts",
    "DashboardBridge",
    "DEFAULT_PORT",
    "Hello",
    "MemberSnapshot",
    "ProtocolDecodeError",
    "ProtocolError",
    "Publish",
    "Rejected",
    "RelayClient",
    "RelayServer",
    "RelaySession",
    "Revert",
    "Welcome",
    "WireMessage",
    "backoff_delay",
    "decode_message",
    "encode_message",
    "encode_text_frame",
    "read_frame",
    "websocket_accept",
]

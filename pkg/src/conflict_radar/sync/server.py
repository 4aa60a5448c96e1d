"""Relay server: session state machine plus a thin TCP shell.

RelaySession is pure (no sockets, no threads) so the protocol rules can
be simulated and property-tested directly. RelayServer wraps it in a
socket accept loop with one reader thread per client; all state changes
happen under one lock, which gives the session a total broadcast order.
"""

from __future__ import annotations

import socket
import threading
import uuid
from dataclasses import dataclass
from typing import Callable, Optional

from ..detect import DetectOptions, GateResult, detect, purge_on_revert, version_gate
from ..distill import fold, rename_aliases
from ..model import ChangeSet
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

DEFAULT_PORT = 7341


@dataclass
class _Member:
    change_set: ChangeSet
    max_seq: int
    base_revision: int


class RelaySession:
    """Protocol state for one collaboration session.

    Stores each member's consolidated ChangeSet. Publishes are gated
    against the highest base revision seen anywhere in the session and
    deduplicated by the author's wire sequence numbers, so replaying a
    delta is a no-op.
    """

    def __init__(self, session_id: Optional[str] = None):
        self.session_id = session_id or uuid.uuid4().hex[:12]
        self.project: Optional[str] = None
        self.members: dict[str, _Member] = {}
        self.highest_revision = 0

    def hello(self, msg: Hello) -> Welcome:
        if self.project is None:
            self.project = msg.project
        member = self.members.get(msg.author)
        if member is None:
            empty = ChangeSet(author=msg.author, base_revision=msg.base_revision)
            self.members[msg.author] = _Member(empty, 0, msg.base_revision)
        else:
            member.base_revision = max(member.base_revision, msg.base_revision)
        self.highest_revision = max(self.highest_revision, msg.base_revision)
        return Welcome(self.session_id, self.snapshot())

    def snapshot(self) -> tuple[MemberSnapshot, ...]:
        return tuple(
            MemberSnapshot(m.change_set, m.max_seq)
            for _, m in sorted(self.members.items())
        )

    def publish(self, author: str, delta: ChangeSet) -> Optional[WireMessage]:
        """Apply one PUBLISH; returns the Broadcast to fan out, a
        Rejected notice for the sender, or None when nothing changed."""
        if delta.author != author:
            return Rejected("delta author does not match the session member", 0, 0)
        if version_gate(delta.base_revision, self.highest_revision) is GateResult.REJECTED:
            return Rejected(
                "base revision is older than the session's",
                delta.base_revision,
                self.highest_revision,
            )
        if not delta.changes:
            return None
        member = self.members.get(author)
        if member is None:
            member = _Member(
                ChangeSet(author=author, base_revision=delta.base_revision),
                0,
                delta.base_revision,
            )
            self.members[author] = member
        top = max(c.seq for c in delta.changes)
        if top <= member.max_seq:
            return None  # duplicate delivery
        stored = member.change_set if member.change_set.changes else None
        member.change_set = fold(stored, delta)
        member.max_seq = top
        member.base_revision = delta.base_revision
        self.highest_revision = max(self.highest_revision, delta.base_revision)
        return Broadcast(author, delta)

    def revert(self, msg: Revert) -> Optional[Revert]:
        member = self.members.get(msg.author)
        if member is None:
            return None
        member.change_set = purge_on_revert(member.change_set, msg.file_path)
        return msg

    def conflicts(self, options: DetectOptions = DetectOptions()) -> Conflicts:
        """Recompute every member's reports (dashboard feed only;
        workspace clients stay authoritative for their own view)."""
        authors = sorted(self.members)
        reports = {}
        for author in authors:
            local = self.members[author].change_set
            remotes = [self.members[b].change_set for b in authors if b != author]
            aliases = [a for s in (local, *remotes) for a in rename_aliases(s)]
            reports[author] = tuple(detect(local, remotes, aliases=aliases, options=options))
        return Conflicts(reports)


class RelayServer:
    """TCP shell around RelaySession.

    Listens on host:port, speaks newline-delimited wire messages, and
    mirrors every outbound Broadcast/Revert/Conflicts to registered
    observers (the WebSocket bridge for dashboards).
    """

    def __init__(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT,
                 session: Optional[RelaySession] = None):
        self.host = host
        self.port = port
        self.session = session or RelaySession()
        self._lock = threading.RLock()
        self._listener: Optional[socket.socket] = None
        self._threads: list[threading.Thread] = []
        self._conns: dict[socket.socket, Optional[str]] = {}
        self._observers: list[Callable[[WireMessage], None]] = []
        self._running = False

    # -- lifecycle ---------------------------------------------------

    def start(self) -> int:
        """Bind and start accepting; returns the bound port (use port=0
        for an ephemeral one in tests)."""
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self.port))
        listener.listen()
        # close() does not wake a thread blocked in accept(), and the
        # kernel keeps completing handshakes while one is; a short
        # accept timeout lets the loop observe shutdown promptly.
        listener.settimeout(0.25)
        self._listener = listener
        self.port = listener.getsockname()[1]
        self._running = True
        t = threading.Thread(target=self._accept_loop, name="radar-accept", daemon=True)
        t.start()
        self._threads.append(t)
        return self.port

    def stop(self) -> None:
        self._running = False
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        with self._lock:
            conns = list(self._conns)
        for conn in conns:
            self._drop(conn)
        for t in self._threads:
            t.join(timeout=2)

    def add_observer(self, fn: Callable[[WireMessage], None]) -> None:
        with self._lock:
            self._observers.append(fn)

    def remove_observer(self, fn: Callable[[WireMessage], None]) -> None:
        with self._lock:
            if fn in self._observers:
                self._observers.remove(fn)

    def welcome_for_observer(self) -> Welcome:
        """Snapshot handed to a dashboard that just attached."""
        with self._lock:
            return Welcome(self.session.session_id, self.session.snapshot())

    def conflicts_now(self) -> Conflicts:
        with self._lock:
            return self.session.conflicts()

    # -- socket plumbing ---------------------------------------------

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while self._running:
            try:
                conn, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            if not self._running:
                try:
                    conn.close()
                except OSError:
                    pass
                return
            conn.settimeout(None)
            with self._lock:
                self._conns[conn] = None
            t = threading.Thread(
                target=self._client_loop, args=(conn,), name="radar-client", daemon=True
            )
            t.start()
            self._threads.append(t)

    def _client_loop(self, conn: socket.socket) -> None:
        reader = conn.makefile("r", encoding="utf-8", newline="\n")
        try:
            for line in reader:
                line = line.strip("\n")
                if not line:
                    continue
                try:
                    msg = decode_message(line)
                except ProtocolDecodeError as exc:
                    # One bad line poisons only this client.
                    self._send(conn, ProtocolError(str(exc)))
                    break
                if not self._dispatch(conn, msg):
                    break
        except (OSError, ValueError):
            pass
        finally:
            self._drop(conn)

    def _dispatch(self, conn: socket.socket, msg: WireMessage) -> bool:
        """Handle one inbound message; False ends the connection."""
        with self._lock:
            if isinstance(msg, Hello):
                self._conns[conn] = msg.author
                self._send(conn, self.session.hello(msg))
                return True
            if isinstance(msg, Publish):
                author = self._conns.get(conn)
                if author is None:
                    self._send(conn, ProtocolError("PUBLISH before HELLO"))
                    return False
                out = self.session.publish(author, msg.delta)
                if isinstance(out, Rejected):
                    self._send(conn, out)
                elif isinstance(out, Broadcast):
                    self._fan_out(out, exclude=conn)
                    self._notify_observers(out)
                    self._notify_observers(self.session.conflicts())
                return True
            if isinstance(msg, Revert):
                out = self.session.revert(msg)
                if out is not None:
                    self._fan_out(out, exclude=conn)
                    self._notify_observers(out)
                    self._notify_observers(self.session.conflicts())
                return True
            if isinstance(msg, Bye):
                return False
            # Server-only message types arriving from a client.
            self._send(conn, ProtocolError(f"unexpected {msg.TYPE} from client"))
            return False

    def _fan_out(self, msg: WireMessage, exclude: Optional[socket.socket]) -> None:
        for conn, author in list(self._conns.items()):
            if conn is exclude or author is None:
                continue
            self._send(conn, msg)

    def _notify_observers(self, msg: WireMessage) -> None:
        for fn in list(self._observers):
            try:
                fn(msg)
            except Exception:
                pass  # an observer must never take the relay down

    def _send(self, conn: socket.socket, msg: WireMessage) -> None:
        try:
            conn.sendall((encode_message(msg) + "\n").encode("utf-8"))
        except OSError:
            self._drop(conn)

    def _drop(self, conn: socket.socket) -> None:
        with self._lock:
            self._conns.pop(conn, None)
        try:
            conn.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            conn.close()
        except OSError:
            pass

"""Workspace-side sync client.

ClientCore holds the member's view of the session (its own consolidated
set plus every remote set) and reruns detection after each change; it is
pure so the simulation harness can drive it message by message.
RelayClient is the socket shell: one reader thread, reconnect with
exponential backoff, and pending deltas retained across outages.
"""

from __future__ import annotations

import socket
import threading
from typing import Callable, Optional

from ..detect import DetectOptions, GateResult, detect, purge_on_revert, version_gate
from ..distill import fold, rename_aliases
from ..model import ChangeSet, ConflictReport, Span
from .protocol import (
    Broadcast,
    Bye,
    Hello,
    Publish,
    Rejected,
    Revert,
    Welcome,
    WireMessage,
    decode_message,
    encode_message,
)
from .server import DEFAULT_PORT

BACKOFF_BASE = 0.25
BACKOFF_CAP = 8.0


def backoff_delay(attempt: int) -> float:
    """Exponential backoff: 0.25 s doubling up to the 8 s cap."""
    return min(BACKOFF_BASE * (2 ** attempt), BACKOFF_CAP)


def _top_seq(delta: ChangeSet) -> int:
    return max(c.seq for c in delta.changes)


class _Remote:
    __slots__ = ("change_set", "max_seq")

    def __init__(self, change_set: ChangeSet, max_seq: int):
        self.change_set = change_set
        self.max_seq = max_seq


class ClientCore:
    """One member's session view and detection state.

    The local ChangeSet is owned by the workspace agent and pushed in
    via set_local; broadcasts fold into per-author remote sets with the
    same gate and dedup rules the server applies (defense in depth).
    """

    def __init__(self, author: str, base_revision: int = 0,
                 options: DetectOptions = DetectOptions(),
                 span_resolver: Optional[Callable] = None):
        self.author = author
        self.base_revision = base_revision
        self.options = options
        self.span_resolver = span_resolver
        self.local = ChangeSet(author=author, base_revision=base_revision)
        self.remotes: dict[str, _Remote] = {}

    def set_local(self, change_set: ChangeSet) -> None:
        if change_set.author != self.author:
            raise ValueError("local set belongs to a different author")
        self.local = change_set
        self.base_revision = max(self.base_revision, change_set.base_revision)

    def set_base_revision(self, revision: int) -> None:
        self.base_revision = max(self.base_revision, revision)

    def adopt_snapshot(self, welcome: Welcome) -> None:
        """Replace remote state wholesale; the server is authoritative
        at join time (late joiners see the fold of all prior deltas)."""
        self.remotes = {
            m.author: _Remote(m.change_set, m.max_seq)
            for m in welcome.snapshot
            if m.author != self.author
        }
        for m in welcome.snapshot:
            self.base_revision = max(self.base_revision, m.change_set.base_revision)

    def apply_broadcast(self, msg: Broadcast) -> bool:
        """Fold one remote delta; returns True when state changed."""
        if msg.author == self.author:
            return False
        if version_gate(msg.delta.base_revision, self.base_revision) is GateResult.REJECTED:
            return False
        if not msg.delta.changes:
            return False
        remote = self.remotes.get(msg.author)
        top = max(c.seq for c in msg.delta.changes)
        if remote is None:
            self.remotes[msg.author] = _Remote(fold(None, msg.delta), top)
            return True
        if top <= remote.max_seq:
            return False  # duplicate delivery
        stored = remote.change_set if remote.change_set.changes else None
        remote.change_set = fold(stored, msg.delta)
        remote.max_seq = top
        return True

    def apply_revert(self, msg: Revert) -> bool:
        remote = self.remotes.get(msg.author)
        if remote is None:
            return False
        purged = purge_on_revert(remote.change_set, msg.file_path)
        changed = purged != remote.change_set
        remote.change_set = purged
        return changed

    def purge_local(self, file_path: str) -> None:
        self.local = purge_on_revert(self.local, file_path)

    def reports(self) -> list[ConflictReport]:
        remote_sets = [r.change_set for r in self.remotes.values()]
        aliases = [a for s in (self.local, *remote_sets) for a in rename_aliases(s)]
        return detect(
            self.local,
            remote_sets,
            aliases=aliases,
            span_resolver=self.span_resolver,
            options=self.options,
        )


class RelayClient:
    """Socket shell around ClientCore.

    publish() never blocks on reconnection: every delta joins a log
    that is flushed opportunistically. A send into a dying socket can
    vanish in the kernel buffer, so the log is only pruned against the
    maxSeq the server acknowledges in WELCOME; after each reconnect the
    unacknowledged tail is resent, and the server's (author, seq) dedup
    makes double delivery harmless.
    """

    def __init__(self, core: ClientCore, project: str,
                 host: str = "127.0.0.1", port: int = DEFAULT_PORT,
                 on_reports: Optional[Callable[[list[ConflictReport]], None]] = None,
                 on_rejected: Optional[Callable[[Rejected], None]] = None,
                 sleep: Callable[[float], None] = None):
        self.core = core
        self.project = project
        self.host = host
        self.port = port
        self.on_reports = on_reports
        self.on_rejected = on_rejected
        self._sleep = sleep if sleep is not None else threading.Event().wait
        self._lock = threading.RLock()
        self._sock: Optional[socket.socket] = None
        self._log: list[ChangeSet] = []
        self._acked_seq = 0
        self._sent_seq = 0
        self._welcome = threading.Event()
        self._running = False
        self._thread: Optional[threading.Thread] = None
        self._last_reports: list[ConflictReport] = []

    # -- lifecycle ---------------------------------------------------

    def connect(self, timeout: float = 5.0) -> bool:
        """Start the network thread; True once the first WELCOME lands."""
        self._running = True
        self._thread = threading.Thread(target=self._run, name="radar-net", daemon=True)
        self._thread.start()
        return self._welcome.wait(timeout)

    def close(self) -> None:
        self._running = False
        with self._lock:
            sock = self._sock
            self._sock = None
        if sock is not None:
            try:
                sock.sendall((encode_message(Bye(self.core.author)) + "\n").encode("utf-8"))
            except OSError:
                pass
            try:
                sock.close()
            except OSError:
                pass
        if self._thread is not None:
            self._thread.join(timeout=2)

    # -- outbound ----------------------------------------------------

    def publish(self, delta: ChangeSet) -> None:
        """Log a delta; it is flushed as soon as a connection exists."""
        if not delta.changes:
            return
        with self._lock:
            self._log.append(delta)
            sock = self._sock
        if sock is not None:
            self._flush(sock)

    def revert(self, file_path: str) -> None:
        self.core.purge_local(file_path)
        with self._lock:
            sock = self._sock
        if sock is not None:
            try:
                msg = Revert(self.core.author, file_path)
                sock.sendall((encode_message(msg) + "\n").encode("utf-8"))
            except OSError:
                pass
        self._emit_reports()

    def _flush(self, sock: socket.socket) -> None:
        with self._lock:
            unsent = [d for d in self._log if _top_seq(d) > self._sent_seq]
        for delta in unsent:
            try:
                sock.sendall((encode_message(Publish(delta)) + "\n").encode("utf-8"))
            except OSError:
                return  # the tail stays logged for the reconnect
            with self._lock:
                self._sent_seq = max(self._sent_seq, _top_seq(delta))

    # -- network loop ------------------------------------------------

    def _run(self) -> None:
        attempt = 0
        while self._running:
            sock = self._dial()
            if sock is None:
                self._sleep(backoff_delay(attempt))
                attempt += 1
                continue
            attempt = 0
            try:
                self._session(sock)
            except (OSError, ValueError):
                pass  # dropped mid-read; the loop below reconnects
            finally:
                with self._lock:
                    if self._sock is sock:
                        self._sock = None
                try:
                    sock.close()
                except OSError:
                    pass
            if self._running:
                self._sleep(backoff_delay(attempt))
                attempt += 1

    def _dial(self) -> Optional[socket.socket]:
        try:
            sock = socket.create_connection((self.host, self.port), timeout=5)
            sock.settimeout(None)
            hello = Hello(self.core.author, self.project, self.core.base_revision)
            sock.sendall((encode_message(hello) + "\n").encode("utf-8"))
            return sock
        except OSError:
            return None

    def _session(self, sock: socket.socket) -> None:
        reader = sock.makefile("r", encoding="utf-8", newline="\n")
        for line in reader:
            line = line.strip("\n")
            if not line:
                continue
            try:
                msg = decode_message(line)
            except Exception:
                return
            self._handle(sock, msg)
            if not self._running:
                return

    def _handle(self, sock: socket.socket, msg: WireMessage) -> None:
        if isinstance(msg, Welcome):
            self.core.adopt_snapshot(msg)
            acked = 0
            for member in msg.snapshot:
                if member.author == self.core.author:
                    acked = member.max_seq
            with self._lock:
                self._acked_seq = acked
                self._sent_seq = acked
                self._log = [d for d in self._log if _top_seq(d) > acked]
                self._sock = sock
            self._welcome.set()
            self._flush(sock)
            self._emit_reports()
        elif isinstance(msg, Broadcast):
            if self.core.apply_broadcast(msg):
                self._emit_reports()
        elif isinstance(msg, Revert):
            if self.core.apply_revert(msg):
                self._emit_reports()
        elif isinstance(msg, Rejected):
            # A rejected delta must not haunt the resend log; whoever
            # reacts to the rejection republishes against a fresh base.
            with self._lock:
                self._log = [d for d in self._log if d.base_revision > msg.incoming_base]
            if self.on_rejected is not None:
                self.on_rejected(msg)

    def refresh_reports(self) -> None:
        """Re-run detection after a local core change (publishes, purges)."""
        self._emit_reports()

    def _emit_reports(self) -> None:
        reports = self.core.reports()
        if reports != self._last_reports:
            self._last_reports = reports
            if self.on_reports is not None:
                self.on_reports(reports)

    @property
    def reports(self) -> list[ConflictReport]:
        return list(self._last_reports)

    @property
    def acked_seq(self) -> int:
        """Highest own seq the relay has acknowledged seeing."""
        with self._lock:
            return self._acked_seq

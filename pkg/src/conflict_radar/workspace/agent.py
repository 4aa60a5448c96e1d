"""Workspace agent: watch files, snapshot error-free states, publish.

The agent diffs saved snapshots against the trees it last published,
starting from the base-revision content, so editor keystroke streams
and batch saves distill identically. Nothing leaves the workspace while
any touched file fails to parse; a held burst simply widens the next
error-free delta. All agent state mutates on the coordinator loop (or
in scan_now for tests); watch backends only mark paths dirty.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from fnmatch import fnmatch
from pathlib import Path
from typing import Optional

from ..detect import purge_on_revert
from ..distill import extract_changes, fold
from ..model import ChangeSet
from ..syntax.lexer import LexError
from ..syntax.parser import ParseError, parse_unit
from ..syntax.tree import ElementTree
from .config import WorkspaceConfig
from .revision import make_provider

log = logging.getLogger("conflict_radar.agent")

POLL_INTERVAL = 1.0


@dataclass
class ScanOutcome:
    """What one processed burst did."""

    published: Optional[ChangeSet] = None
    held: bool = False
    hold_errors: dict[str, str] = field(default_factory=dict)
    reverted: list[str] = field(default_factory=list)


class WorkspaceAgent:
    def __init__(self, config: WorkspaceConfig, client, provider=None, *,
                 poll_interval: float = POLL_INTERVAL, on_status=None):
        self.config = config
        self.client = client
        self.provider = provider if provider is not None else make_provider(
            config.revision_provider, config.root_dir
        )
        self.poll_interval = poll_interval
        self.on_status = on_status if on_status is not None else (lambda line: None)

        self.base_revision = self.provider.current_revision()
        self.client.core.set_base_revision(self.base_revision)
        self.stored = ChangeSet(author=config.author, base_revision=self.base_revision)
        self.next_seq = 1
        self.published_trees: dict[str, ElementTree] = {}
        self.baseline_cache: dict[str, Optional[bytes]] = {}
        self.seen_bytes: dict[str, bytes] = {}

        self._cond = threading.Condition()
        self._dirty: set[str] = set()
        self._last_event: Optional[float] = None
        self._resync = False
        self._resync_after: Optional[int] = None
        client.on_rejected = self._on_rejected

        self._init_baselines()

    # -- setup -------------------------------------------------------

    def _init_baselines(self) -> None:
        for rel in self._include_files():
            baseline = self.provider.baseline_bytes(rel)
            self.baseline_cache[rel] = baseline
            self.published_trees[rel] = self._parse_baseline(rel, baseline)
            self.seen_bytes[rel] = baseline if baseline is not None else b""
            if self._read(rel) != self.seen_bytes[rel]:
                self._mark_changed({rel})

    def _parse_baseline(self, rel: str, data: Optional[bytes]) -> ElementTree:
        if data is None:
            return parse_unit("", rel)
        try:
            return parse_unit(data.decode("utf-8"), rel)
        except (LexError, ParseError, UnicodeDecodeError):
            log.warning("baseline for %s does not parse; treating as empty", rel)
            return parse_unit("", rel)

    # -- file enumeration ---------------------------------------------

    def _include_files(self) -> list[str]:
        found = set()
        for pattern in self.config.include:
            for path in self.config.root_dir.glob(pattern):
                if not path.is_file():
                    continue
                rel = path.relative_to(self.config.root_dir).as_posix()
                if rel.startswith(".conflict-radar/"):
                    continue
                found.add(rel)
        return sorted(found)

    def _matches_include(self, rel: str) -> bool:
        if rel.startswith(".conflict-radar/"):
            return False
        for pattern in self.config.include:
            if fnmatch(rel, pattern):
                return True
            # fnmatch's ** needs a slash; accept top-level files too.
            if pattern.startswith("**/") and fnmatch(rel, pattern[3:]):
                return True
        return False

    def _read(self, rel: str) -> bytes:
        try:
            return (self.config.root_dir / rel).read_bytes()
        except OSError:
            return b""

    # -- dirt tracking -------------------------------------------------

    def _mark_changed(self, paths: set[str]) -> None:
        if not paths:
            return
        with self._cond:
            self._dirty |= paths
            self._last_event = time.monotonic()
            self._cond.notify_all()

    def _detect_changes(self) -> set[str]:
        changed = set()
        for rel in self._include_files():
            if self._read(rel) != self.seen_bytes.get(rel, b""):
                changed.add(rel)
        return changed

    def _on_rejected(self, msg) -> None:
        # Republishing before the base catches up would just be
        # rejected again, so remember the bar instead of retrying.
        self._resync_after = msg.required_base
        self.on_status(
            f"publish rejected: base revision {msg.incoming_base} "
            f"< required {msg.required_base}; will republish after sync"
        )

    def _needs_attention(self) -> bool:
        if self._resync:
            return True
        return self._resync_after is not None and self.base_revision >= self._resync_after

    # -- the heart ------------------------------------------------------

    def scan_now(self) -> ScanOutcome:
        """Detect and process one burst synchronously (test/demo entry)."""
        self._mark_changed(self._detect_changes())
        with self._cond:
            paths = set(self._dirty)
        if (
            not paths
            and not self._needs_attention()
            and self.provider.current_revision() <= self.base_revision
        ):
            return ScanOutcome()
        return self._process(paths)

    def _process(self, paths: set[str]) -> ScanOutcome:
        outcome = ScanOutcome()
        stamp = self.provider.current_revision()
        if stamp > self.base_revision:
            # The base moved under us (the user synced). Changes are
            # defined against the base, so the whole window restarts:
            # purge what the relay holds, rediff against new baselines.
            self.base_revision = stamp
            self.client.core.set_base_revision(stamp)
            self._refresh_baselines()
            for rel in sorted({c.path.file for c in self.stored.changes}):
                self.client.revert(rel)
            self._resync = True
            self.on_status(f"base revision advanced to {stamp}; rebasing")
        if self._resync_after is not None and self.base_revision >= self._resync_after:
            self._resync = True
            self._resync_after = None
        if self._resync:
            # Start the window over from the baselines so the next
            # delta carries everything still outstanding.
            self._resync = False
            for rel in list(self.published_trees):
                self.published_trees[rel] = self._parse_baseline(rel, self.baseline_cache.get(rel))
            self.stored = ChangeSet(author=self.config.author, base_revision=self.base_revision)
            self.client.core.set_local(self.stored)
            extra = self._detect_all_divergence()
            self._mark_changed(extra)  # must survive a parse hold below
            paths = paths | extra

        reverted: list[str] = []
        to_diff: list[str] = []
        contents: dict[str, bytes] = {}
        for rel in sorted(paths):
            if not (self.config.root_dir / rel).is_file():
                continue  # deletions keep their last published state
            data = self._read(rel)
            contents[rel] = data
            baseline = self.baseline_cache.get(rel)
            if baseline is not None and data == baseline:
                if any(c.path.file == rel for c in self.stored.changes):
                    reverted.append(rel)
                else:
                    # Nothing outstanding; just resynchronize the caches.
                    self.published_trees[rel] = self._parse_baseline(rel, baseline)
                    self.seen_bytes[rel] = data
                continue
            to_diff.append(rel)

        trees: dict[str, ElementTree] = {}
        for rel in to_diff:
            try:
                trees[rel] = parse_unit(contents[rel].decode("utf-8"), rel)
            except (LexError, ParseError, UnicodeDecodeError) as exc:
                outcome.hold_errors[rel] = str(exc)
        if outcome.hold_errors:
            outcome.held = True
            broken = ", ".join(sorted(outcome.hold_errors))
            self.on_status(f"held: parse error ({broken})")
            return outcome

        collected = []
        # Never reuse a seq the relay has already acknowledged (a fresh
        # agent in a session that remembers it would be deduplicated
        # into silence otherwise).
        seq = max(self.next_seq, getattr(self.client, "acked_seq", 0) + 1)
        now_millis = int(time.time() * 1000)
        for rel in to_diff:
            old_tree = self.published_trees.get(rel)
            if old_tree is None:
                old_tree = parse_unit("", rel)
            delta = extract_changes(
                old_tree, trees[rel], self.config.author, self.base_revision,
                project=self.config.project_name, seq_start=seq, at_millis=now_millis,
            )
            collected.extend(delta.changes)
            seq += len(delta.changes)
            self.published_trees[rel] = trees[rel]
            self.seen_bytes[rel] = contents[rel]

        for rel in reverted:
            self.stored = purge_on_revert(self.stored, rel)
            self.published_trees[rel] = self._parse_baseline(rel, self.baseline_cache.get(rel))
            self.seen_bytes[rel] = contents[rel]

        if collected:
            delta_set = ChangeSet(
                author=self.config.author, base_revision=self.base_revision,
                changes=tuple(collected),
            )
            self.next_seq = seq
            self.stored = fold(self.stored if self.stored.changes else None, delta_set)
            self.client.core.set_local(self.stored)
            self.client.publish(delta_set)
            outcome.published = delta_set
            self.on_status(f"published {len(collected)} changes")
        else:
            self.client.core.set_local(self.stored)

        for rel in reverted:
            self.client.revert(rel)
            outcome.reverted.append(rel)
            self.on_status(f"revert {rel}")
        if hasattr(self.client, "refresh_reports"):
            self.client.refresh_reports()

        with self._cond:
            self._dirty -= paths
        return outcome

    def _detect_all_divergence(self) -> set[str]:
        changed = set()
        for rel in self._include_files():
            tree = self.published_trees.get(rel)
            if tree is None or self._read(rel) != self.seen_bytes.get(rel, b""):
                changed.add(rel)
            else:
                # After a resync the published tree was rebuilt from the
                # baseline; any divergence from it must republish.
                baseline = self.baseline_cache.get(rel)
                base_bytes = baseline if baseline is not None else b""
                if self._read(rel) != base_bytes:
                    changed.add(rel)
        return changed

    def _refresh_baselines(self) -> None:
        for rel in self._include_files():
            self.baseline_cache[rel] = self.provider.baseline_bytes(rel)

    # -- the loop --------------------------------------------------------

    def run(self, stop_event: threading.Event) -> None:
        """Coordinator loop: watch, debounce, process until stopped."""
        observer = self._try_watchdog()
        if observer is None:
            log.warning("native watch backend unavailable; polling every %.1f s",
                        self.poll_interval)
            self.on_status(f"polling every {self.poll_interval:.1f} s")
        else:
            self.on_status("watching with native backend")
        debounce = self.config.debounce_millis / 1000.0
        slice_s = max(0.01, min(self.poll_interval, debounce if debounce > 0 else 0.05) / 2)
        last_poll = 0.0
        try:
            while not stop_event.is_set():
                now = time.monotonic()
                if now - last_poll >= self.poll_interval:
                    last_poll = now
                    if observer is None:
                        self._mark_changed(self._detect_changes())
                    if self.provider.current_revision() > self.base_revision:
                        self.scan_now()
                with self._cond:
                    has_dirty = bool(self._dirty)
                    settled = (
                        self._last_event is not None
                        and now - self._last_event >= debounce
                    )
                if (has_dirty and settled) or self._needs_attention():
                    self.scan_now()
                stop_event.wait(slice_s)
        finally:
            if observer is not None:
                observer.stop()
                observer.join(timeout=2)

    def _try_watchdog(self):
        try:
            from watchdog.events import FileSystemEventHandler
            from watchdog.observers import Observer
        except ImportError:
            return None

        agent = self
        root = self.config.root_dir

        class Handler(FileSystemEventHandler):
            def on_any_event(self, event):
                if event.is_directory:
                    return
                for raw in (event.src_path, getattr(event, "dest_path", None)):
                    if not raw:
                        continue
                    try:
                        rel = Path(raw).resolve().relative_to(root).as_posix()
                    except ValueError:
                        continue
                    if agent._matches_include(rel):
                        agent._mark_changed({rel})

        try:
            observer = Observer()
            observer.schedule(Handler(), str(root), recursive=True)
            observer.start()
            return observer
        except OSError:
            return None

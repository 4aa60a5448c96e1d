"""Conflict detection over local and remote change sets.

Every path is first canonicalized to its base identity by walking rename
aliases backwards (new to old). Detection then groups changes by
canonical path: a path touched only remotely yields an Awareness report,
a path touched on both sides yields a Conflict report.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional

from .distill import RenameAlias
from .syntax.lexer import Span
from .model import (
    ChangeKind,
    ChangeSet,
    ConflictReport,
    SemanticChange,
    SemanticPath,
    Severity,
    render_path_id,
)

SpanResolver = Callable[[SemanticPath], Optional[Span]]


class GateResult(Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"


def version_gate(incoming_base: int, local_base: int) -> GateResult:
    """Reject change sets built against an older revision than ours.

    Equal or higher base revisions pass; the sender with the higher base
    is the one who has already seen more history.
    """
    if incoming_base < local_base:
        return GateResult.REJECTED
    return GateResult.ACCEPTED


def purge_on_revert(changes: ChangeSet, file_path: str) -> ChangeSet:
    """Drop every change recorded for a file that was reverted."""
    kept = tuple(c for c in changes.changes if c.path.file != file_path)
    return ChangeSet(author=changes.author, base_revision=changes.base_revision, changes=kept)


def build_alias_map(aliases: Iterable[RenameAlias]) -> dict[SemanticPath, SemanticPath]:
    """Index aliases by their new path for reverse resolution."""
    return {a.new_path: a.old_path for a in aliases}


def resolve_base_identity(
    path: SemanticPath, new_to_old: dict[SemanticPath, SemanticPath]
) -> SemanticPath:
    """Chase aliases back to the identity the element had at base.

    Exact-path aliases are applied first (param renames), then aliases on
    the enclosing member (method renames, arity shifts) while keeping the
    param segment. A visited set guards against alias cycles.
    """
    seen = {path}
    while True:
        nxt = new_to_old.get(path)
        if nxt is None and path.param is not None:
            member_old = new_to_old.get(path.with_param(None))
            if member_old is not None:
                nxt = member_old.with_param(path.param)
        if nxt is None or nxt in seen:
            return path
        seen.add(nxt)
        path = nxt


class PathIndex:
    """Changes bucketed by canonical path, O(1) membership."""

    def __init__(self, new_to_old: dict[SemanticPath, SemanticPath]):
        self._aliases = new_to_old
        self._buckets: dict[SemanticPath, list[SemanticChange]] = {}

    def add(self, change: SemanticChange) -> SemanticPath:
        key = resolve_base_identity(change.path, self._aliases)
        self._buckets.setdefault(key, []).append(change)
        return key

    def add_all(self, changes: Iterable[SemanticChange]) -> None:
        for c in changes:
            self.add(c)

    def get(self, key: SemanticPath) -> list[SemanticChange]:
        return self._buckets.get(key, [])

    def keys(self) -> list[SemanticPath]:
        return list(self._buckets)

    def __len__(self) -> int:
        return sum(len(b) for b in self._buckets.values())


@dataclass(frozen=True)
class DetectOptions:
    """Severity refinements applied after the both-sides rule."""

    suppress_identical: bool = False


def detect(
    local: ChangeSet,
    remotes: Iterable[ChangeSet],
    aliases: Iterable[RenameAlias] = (),
    span_resolver: Optional[SpanResolver] = None,
    options: DetectOptions = DetectOptions(),
) -> list[ConflictReport]:
    """Match local changes against everyone else's, one report per path.

    Remote-only paths produce Awareness reports; paths changed on both
    sides produce Conflicts. span_resolver, when given, maps a canonical
    path to its location in the local working copy for Awareness
    decorations; without it the remote change's own span is used.
    """
    new_to_old = build_alias_map(aliases)

    local_index = PathIndex(new_to_old)
    local_index.add_all(local.changes)

    remote_index = PathIndex(new_to_old)
    for rs in remotes:
        if rs.author == local.author:
            continue
        remote_index.add_all(rs.changes)

    reports = []
    for key in remote_index.keys():
        remote_here = remote_index.get(key)
        local_here = local_index.get(key)
        severity = Severity.CONFLICT if local_here else Severity.AWARENESS
        if severity is Severity.CONFLICT and options.suppress_identical:
            if _identical_body_edits(local_here, remote_here):
                severity = Severity.AWARENESS
                local_here = []
        if local_here:
            span = max(local_here, key=lambda c: c.seq).decoration_span
        else:
            span = span_resolver(key) if span_resolver is not None else None
            if span is None:
                span = max(remote_here, key=lambda c: c.seq).decoration_span
        reports.append(
            ConflictReport(
                path_id=render_path_id(key),
                severity=severity,
                local_kinds=frozenset(c.kind for c in local_here),
                remote_authors=frozenset(c.author for c in remote_here),
                remote_kinds=frozenset(c.kind for c in remote_here),
                decoration_span=span,
            )
        )
    reports.sort(key=lambda r: r.path_id)
    return reports


def _identical_body_edits(
    local_here: list[SemanticChange], remote_here: list[SemanticChange]
) -> bool:
    """True when both sides only re-fingerprinted the body to the same value."""
    both = local_here + remote_here
    if any(c.kind is not ChangeKind.METHOD_BODY_CHANGED for c in both):
        return False
    fps = {c.new_fingerprint for c in both}
    return len(fps) == 1

"""Semantic paths, change kinds, change sets, and conflict reports.

These are the lightweight metadata records exchanged between workspaces
in place of tree diffs or code. All types are immutable values with
canonical JSON encodings (documented in protocol.md).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from .syntax.lexer import Span, fingerprint_hex

# SCM revision number; totally ordered by integer comparison.
RevisionStamp = int


class ChangeKind(Enum):
    METHOD_BODY_CHANGED = "MethodBodyChanged"
    METHOD_RENAMED = "MethodRenamed"
    METHOD_RETURN_TYPE_CHANGED = "MethodReturnTypeChanged"
    METHOD_ACCESSIBILITY_CHANGED = "MethodAccessibilityChanged"
    PARAM_RENAMED = "ParamRenamed"
    PARAM_TYPE_CHANGED = "ParamTypeChanged"
    PARAM_ADDED = "ParamAdded"
    PARAM_REMOVED = "ParamRemoved"
    FIELD_RENAMED = "FieldRenamed"
    FIELD_TYPE_CHANGED = "FieldTypeChanged"
    FIELD_VALUE_CHANGED = "FieldValueChanged"
    FIELD_ACCESSIBILITY_CHANGED = "FieldAccessibilityChanged"
    # Plumbing kinds, beyond the per-attribute taxonomy above.
    ELEMENT_ADDED = "ElementAdded"
    ELEMENT_REMOVED = "ElementRemoved"
    MODIFIER_SET_CHANGED = "ModifierSetChanged"


TAXONOMY_KINDS: tuple[ChangeKind, ...] = tuple(list(ChangeKind)[:12])
PLUMBING_KINDS: tuple[ChangeKind, ...] = tuple(list(ChangeKind)[12:])

RENAME_KINDS = frozenset(
    {ChangeKind.METHOD_RENAMED, ChangeKind.FIELD_RENAMED, ChangeKind.PARAM_RENAMED}
)


class Severity(Enum):
    AWARENESS = "Awareness"
    CONFLICT = "Conflict"


@dataclass(frozen=True)
class MemberRef:
    kind: str  # "field" | "method"
    name: str
    arity: Optional[int] = None  # methods only

    def __post_init__(self):
        if self.kind not in ("field", "method"):
            raise ValueError(f"bad member kind {self.kind!r}")
        if (self.kind == "method") != (self.arity is not None):
            raise ValueError("arity is set exactly for methods")

    def to_json(self) -> dict:
        return {"kind": self.kind, "name": self.name, "arity": self.arity}

    @staticmethod
    def from_json(obj: dict) -> "MemberRef":
        return MemberRef(kind=obj["kind"], name=obj["name"], arity=obj.get("arity"))


@dataclass(frozen=True)
class SemanticPath:
    """Structured identity of a project element; the conflict-matching key.

    The rendered id (render_path_id) is for display and logging; equality
    and hashing of the structured form are what detection relies on.
    """

    project: str
    file: str
    class_chain: tuple[str, ...]
    member: Optional[MemberRef] = None
    param: Optional[str] = None

    def __post_init__(self):
        if not self.class_chain:
            raise ValueError("class_chain must name at least one class")
        if self.param is not None and (self.member is None or self.member.kind != "method"):
            raise ValueError("param paths require a method member")

    def with_member_name(self, name: str) -> "SemanticPath":
        assert self.member is not None
        return SemanticPath(
            self.project,
            self.file,
            self.class_chain,
            MemberRef(self.member.kind, name, self.member.arity),
            self.param,
        )

    def with_member_arity(self, arity: Optional[int]) -> "SemanticPath":
        assert self.member is not None
        return SemanticPath(
            self.project,
            self.file,
            self.class_chain,
            MemberRef(self.member.kind, self.member.name, arity),
            self.param,
        )

    def with_param(self, param: Optional[str]) -> "SemanticPath":
        return SemanticPath(self.project, self.file, self.class_chain, self.member, param)

    def to_json(self) -> dict:
        return {
            "project": self.project,
            "file": self.file,
            "classChain": list(self.class_chain),
            "member": self.member.to_json() if self.member else None,
            "param": self.param,
        }

    @staticmethod
    def from_json(obj: dict) -> "SemanticPath":
        member = obj.get("member")
        return SemanticPath(
            project=obj["project"],
            file=obj["file"],
            class_chain=tuple(obj["classChain"]),
            member=MemberRef.from_json(member) if member else None,
            param=obj.get("param"),
        )


def render_path_id(path: SemanticPath) -> str:
    """Join the path segments with '/'; no leading or trailing slash.

    The file segment keeps its internal directory separators; method
    segments omit arity (the structured form carries it for overloads).
    """
    segments = [path.project, path.file, *path.class_chain]
    if path.member is not None:
        segments.append(path.member.name)
    if path.param is not None:
        segments.append(path.param)
    return "/".join(segments)


@dataclass(frozen=True)
class SemanticChange:
    """One edit to one attribute of one semantic element.

    Rename kinds always carry old_value and new_value. Body changes carry
    neither; their before/after fingerprints ride in the auxiliary
    old_fingerprint/new_fingerprint fields. Element/param add-remove
    records carry an attribute snapshot so later consolidation can net
    them against re-adds.
    """

    kind: ChangeKind
    path: SemanticPath
    old_value: Optional[str]
    new_value: Optional[str]
    author: str
    base_revision: RevisionStamp
    seq: int
    at_millis: int
    decoration_span: Span
    old_fingerprint: Optional[int] = None
    new_fingerprint: Optional[int] = None
    attributes: Optional[Mapping[str, str]] = None

    def essence(self) -> tuple:
        """Content identity, presentation fields (seq/time/span) excluded."""
        return (
            self.kind,
            self.path,
            self.old_value,
            self.new_value,
            self.old_fingerprint,
            self.new_fingerprint,
            tuple(sorted((self.attributes or {}).items())),
        )

    def with_seq(self, seq: int) -> "SemanticChange":
        return SemanticChange(
            kind=self.kind,
            path=self.path,
            old_value=self.old_value,
            new_value=self.new_value,
            author=self.author,
            base_revision=self.base_revision,
            seq=seq,
            at_millis=self.at_millis,
            decoration_span=self.decoration_span,
            old_fingerprint=self.old_fingerprint,
            new_fingerprint=self.new_fingerprint,
            attributes=self.attributes,
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "path": self.path.to_json(),
            "oldValue": self.old_value,
            "newValue": self.new_value,
            "author": self.author,
            "baseRevision": self.base_revision,
            "seq": self.seq,
            "atMillis": self.at_millis,
            "decorationSpan": self.decoration_span.to_json(),
            "oldFingerprint": fingerprint_hex(self.old_fingerprint),
            "newFingerprint": fingerprint_hex(self.new_fingerprint),
            "attributes": dict(self.attributes) if self.attributes is not None else None,
        }

    @staticmethod
    def from_json(obj: dict) -> "SemanticChange":
        return SemanticChange(
            kind=ChangeKind(obj["kind"]),
            path=SemanticPath.from_json(obj["path"]),
            old_value=obj.get("oldValue"),
            new_value=obj.get("newValue"),
            author=obj["author"],
            base_revision=obj["baseRevision"],
            seq=obj["seq"],
            at_millis=obj["atMillis"],
            decoration_span=Span.from_json(obj["decorationSpan"]),
            old_fingerprint=(
                int(obj["oldFingerprint"], 16) if obj.get("oldFingerprint") else None
            ),
            new_fingerprint=(
                int(obj["newFingerprint"], 16) if obj.get("newFingerprint") else None
            ),
            attributes=obj.get("attributes"),
        )


@dataclass(frozen=True)
class ChangeSet:
    """One author's ordered semantic changes since their base revision."""

    author: str
    base_revision: RevisionStamp
    changes: tuple[SemanticChange, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for c in self.changes:
            if c.author != self.author:
                raise ValueError(f"change author {c.author!r} differs from set author")
        seqs = [c.seq for c in self.changes]
        if any(b <= a for a, b in zip(seqs, seqs[1:])):
            raise ValueError("changes must be strictly ordered by seq")

    def to_json(self) -> dict:
        return {
            "author": self.author,
            "baseRevision": self.base_revision,
            "changes": [c.to_json() for c in self.changes],
        }

    @staticmethod
    def from_json(obj: dict) -> "ChangeSet":
        return ChangeSet(
            author=obj["author"],
            base_revision=obj["baseRevision"],
            changes=tuple(SemanticChange.from_json(c) for c in obj["changes"]),
        )


@dataclass(frozen=True)
class ConflictReport:
    """A detected overlap at one semantic path.

    Awareness: a remote party changed the element, the local one has not.
    Conflict: both sides changed it concurrently.
    """

    path_id: str
    severity: Severity
    local_kinds: frozenset[ChangeKind]
    remote_authors: frozenset[str]
    remote_kinds: frozenset[ChangeKind]
    decoration_span: Span

    def __post_init__(self):
        if self.severity == Severity.AWARENESS and self.local_kinds:
            raise ValueError("awareness reports carry no local kinds")
        if self.severity == Severity.CONFLICT and not (self.local_kinds and self.remote_authors):
            raise ValueError("conflict reports need local kinds and remote authors")

    def to_json(self) -> dict:
        return {
            "pathId": self.path_id,
            "severity": self.severity.value,
            "localKinds": sorted(k.value for k in self.local_kinds),
            "remoteAuthors": sorted(self.remote_authors),
            "remoteKinds": sorted(k.value for k in self.remote_kinds),
            "decorationSpan": self.decoration_span.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "ConflictReport":
        return ConflictReport(
            path_id=obj["pathId"],
            severity=Severity(obj["severity"]),
            local_kinds=frozenset(ChangeKind(k) for k in obj["localKinds"]),
            remote_authors=frozenset(obj["remoteAuthors"]),
            remote_kinds=frozenset(ChangeKind(k) for k in obj["remoteKinds"]),
            decoration_span=Span.from_json(obj["decorationSpan"]),
        )


def canonical_json(obj) -> str:
    """Deterministic single-line JSON: sorted keys, no spaces."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def pretty_json(obj) -> str:
    """Stable multi-line JSON for golden files and CLI output."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)

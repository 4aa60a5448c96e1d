"""Distill two parsed trees into a consolidated change set.

extract_changes compares a before/after pair of ElementTrees and emits
one SemanticChange per differing attribute. consolidate replays a change
sequence and keeps only the net effect per (element, attribute group),
tracking element identity through renames and parameter-list growth.
rename_aliases exposes the identity shifts so detection can match remote
changes recorded against pre-rename ids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .syntax.lexer import Span, ZERO_SPAN, fingerprint_hex
from .model import (
    ChangeKind,
    ChangeSet,
    MemberRef,
    SemanticChange,
    SemanticPath,
)
from .syntax.tree import ClassDecl, ElementTree, FieldDecl, MethodDecl, ParamDecl, modifier_set_text


class MismatchedFile(ValueError):
    """extract_changes was handed trees for two different files."""


@dataclass(frozen=True)
class RenameAlias:
    """Maps an element's pre-change identity to its current identity."""

    old_path: SemanticPath
    new_path: SemanticPath
    author: str

    def to_json(self) -> dict:
        return {
            "oldPath": self.old_path.to_json(),
            "newPath": self.new_path.to_json(),
            "author": self.author,
        }

    @staticmethod
    def from_json(obj: dict) -> "RenameAlias":
        return RenameAlias(
            old_path=SemanticPath.from_json(obj["oldPath"]),
            new_path=SemanticPath.from_json(obj["newPath"]),
            author=obj["author"],
        )


# -- attribute snapshots -------------------------------------------------
#
# ElementAdded/ElementRemoved records carry a flat snapshot of the
# element's attributes so a later consolidation can net a removal against
# a re-add. Values are strings; parameter lists are JSON-encoded pairs.


def encode_params(params: list[tuple[str, str]]) -> str:
    return json.dumps([[t, n] for t, n in params])


def decode_params(text: str) -> list[tuple[str, str]]:
    return [(t, n) for t, n in json.loads(text)]


def field_attrs(decl: FieldDecl) -> dict[str, str]:
    attrs = {
        "accessibility": decl.accessibility,
        "modifiers": modifier_set_text(decl.modifiers),
        "type": decl.type_text,
    }
    if decl.initializer_text is not None:
        attrs["initializer"] = decl.initializer_text
    return attrs


def method_attrs(decl: MethodDecl) -> dict[str, str]:
    attrs = {
        "accessibility": decl.accessibility,
        "modifiers": modifier_set_text(decl.modifiers),
        "bodyFingerprint": fingerprint_hex(decl.body_fingerprint),
        "params": encode_params([(p.type_text, p.name) for p in decl.params]),
    }
    if decl.return_type_text is not None:
        attrs["returnType"] = decl.return_type_text
    return attrs


def class_attrs(decl: ClassDecl) -> dict[str, str]:
    return {"modifiers": modifier_set_text(decl.modifiers)}


# -- change emission -----------------------------------------------------


class _Emitter:
    def __init__(self, author: str, base_revision: int, seq_start: int, at_millis: int):
        self.author = author
        self.base_revision = base_revision
        self.seq = seq_start
        self.at_millis = at_millis
        self.changes: list[SemanticChange] = []

    def emit(
        self,
        kind: ChangeKind,
        path: SemanticPath,
        span: Span,
        old_value: Optional[str] = None,
        new_value: Optional[str] = None,
        old_fingerprint: Optional[int] = None,
        new_fingerprint: Optional[int] = None,
        attributes: Optional[dict[str, str]] = None,
    ) -> None:
        self.changes.append(
            SemanticChange(
                kind=kind,
                path=path,
                old_value=old_value,
                new_value=new_value,
                author=self.author,
                base_revision=self.base_revision,
                seq=self.seq,
                at_millis=self.at_millis,
                decoration_span=span,
                old_fingerprint=old_fingerprint,
                new_fingerprint=new_fingerprint,
                attributes=attributes,
            )
        )
        self.seq += 1


def extract_changes(
    old: ElementTree,
    new: ElementTree,
    author: str,
    base_revision: int,
    *,
    project: str,
    seq_start: int = 1,
    at_millis: int = 0,
) -> ChangeSet:
    """Diff two trees for the same file into a consolidated ChangeSet.

    Raises MismatchedFile when the trees name different files.
    """
    if old.file_path != new.file_path:
        raise MismatchedFile(f"cannot diff {old.file_path!r} against {new.file_path!r}")
    em = _Emitter(author, base_revision, seq_start, at_millis)
    _diff_class_lists(em, project, old.file_path, (), old.classes, new.classes, ZERO_SPAN)
    return ChangeSet(author=author, base_revision=base_revision, changes=tuple(em.changes))


def _class_path(project: str, file_path: str, chain: tuple[str, ...]) -> SemanticPath:
    return SemanticPath(project=project, file=file_path, class_chain=chain)


def _member_path(
    project: str, file_path: str, chain: tuple[str, ...], kind: str, name: str, arity: Optional[int]
) -> SemanticPath:
    return SemanticPath(
        project=project,
        file=file_path,
        class_chain=chain,
        member=MemberRef(kind=kind, name=name, arity=arity),
    )


def _diff_class_lists(
    em: _Emitter,
    project: str,
    file_path: str,
    chain: tuple[str, ...],
    old_classes: tuple[ClassDecl, ...],
    new_classes: tuple[ClassDecl, ...],
    removal_span: Span,
) -> None:
    new_by_name = {c.name: c for c in new_classes}
    old_names = {c.name for c in old_classes}

    for old_cls in old_classes:
        new_cls = new_by_name.get(old_cls.name)
        if new_cls is None:
            _cascade_removed_class(em, project, file_path, chain, old_cls, removal_span)
            continue
        sub_chain = chain + (old_cls.name,)
        if old_cls.modifiers != new_cls.modifiers:
            em.emit(
                ChangeKind.MODIFIER_SET_CHANGED,
                _class_path(project, file_path, sub_chain),
                new_cls.modifiers_span or new_cls.name_span,
                old_value=modifier_set_text(old_cls.modifiers),
                new_value=modifier_set_text(new_cls.modifiers),
            )
        _diff_fields(em, project, file_path, sub_chain, old_cls, new_cls)
        _diff_methods(em, project, file_path, sub_chain, old_cls, new_cls)
        _diff_class_lists(
            em, project, file_path, sub_chain, old_cls.nested, new_cls.nested, new_cls.name_span
        )

    for new_cls in new_classes:
        if new_cls.name not in old_names:
            _cascade_added_class(em, project, file_path, chain, new_cls)


def _cascade_added_class(
    em: _Emitter, project: str, file_path: str, chain: tuple[str, ...], cls: ClassDecl
) -> None:
    sub_chain = chain + (cls.name,)
    em.emit(
        ChangeKind.ELEMENT_ADDED,
        _class_path(project, file_path, sub_chain),
        cls.name_span,
        attributes=class_attrs(cls),
    )
    for f in cls.fields:
        em.emit(
            ChangeKind.ELEMENT_ADDED,
            _member_path(project, file_path, sub_chain, "field", f.name, None),
            f.name_span,
            attributes=field_attrs(f),
        )
    for m in cls.methods:
        em.emit(
            ChangeKind.ELEMENT_ADDED,
            _member_path(project, file_path, sub_chain, "method", m.name, m.arity),
            m.name_span,
            attributes=method_attrs(m),
        )
    for inner in cls.nested:
        _cascade_added_class(em, project, file_path, sub_chain, inner)


def _cascade_removed_class(
    em: _Emitter,
    project: str,
    file_path: str,
    chain: tuple[str, ...],
    cls: ClassDecl,
    span: Span,
) -> None:
    sub_chain = chain + (cls.name,)
    em.emit(
        ChangeKind.ELEMENT_REMOVED,
        _class_path(project, file_path, sub_chain),
        span,
        attributes=class_attrs(cls),
    )
    for f in cls.fields:
        em.emit(
            ChangeKind.ELEMENT_REMOVED,
            _member_path(project, file_path, sub_chain, "field", f.name, None),
            span,
            attributes=field_attrs(f),
        )
    for m in cls.methods:
        em.emit(
            ChangeKind.ELEMENT_REMOVED,
            _member_path(project, file_path, sub_chain, "method", m.name, m.arity),
            span,
            attributes=method_attrs(m),
        )
    for inner in cls.nested:
        _cascade_removed_class(em, project, file_path, sub_chain, inner, span)


# -- fields ---------------------------------------------------------------


def _diff_fields(
    em: _Emitter,
    project: str,
    file_path: str,
    chain: tuple[str, ...],
    old_cls: ClassDecl,
    new_cls: ClassDecl,
) -> None:
    old_by_name = {f.name: f for f in old_cls.fields}
    new_by_name = {f.name: f for f in new_cls.fields}

    unmatched_old = [f for f in old_cls.fields if f.name not in new_by_name]
    unmatched_new = [f for f in new_cls.fields if f.name not in old_by_name]

    for old_f in old_cls.fields:
        new_f = new_by_name.get(old_f.name)
        if new_f is not None:
            _diff_field_pair(em, project, file_path, chain, old_f, new_f, renamed=False)

    # Rename pass: identical type and initializer, first-to-first in
    # source order.
    still_old: list[FieldDecl] = []
    for old_f in unmatched_old:
        target = next(
            (
                n
                for n in unmatched_new
                if n.type_text == old_f.type_text
                and n.initializer_text == old_f.initializer_text
            ),
            None,
        )
        if target is None:
            still_old.append(old_f)
            continue
        unmatched_new.remove(target)
        _diff_field_pair(em, project, file_path, chain, old_f, target, renamed=True)

    for old_f in still_old:
        em.emit(
            ChangeKind.ELEMENT_REMOVED,
            _member_path(project, file_path, chain, "field", old_f.name, None),
            new_cls.name_span,
            attributes=field_attrs(old_f),
        )
    for new_f in unmatched_new:
        em.emit(
            ChangeKind.ELEMENT_ADDED,
            _member_path(project, file_path, chain, "field", new_f.name, None),
            new_f.name_span,
            attributes=field_attrs(new_f),
        )


def _diff_field_pair(
    em: _Emitter,
    project: str,
    file_path: str,
    chain: tuple[str, ...],
    old_f: FieldDecl,
    new_f: FieldDecl,
    renamed: bool,
) -> None:
    path = _member_path(project, file_path, chain, "field", new_f.name, None)
    if renamed:
        em.emit(
            ChangeKind.FIELD_RENAMED,
            path,
            new_f.name_span,
            old_value=old_f.name,
            new_value=new_f.name,
        )
    if old_f.accessibility != new_f.accessibility:
        em.emit(
            ChangeKind.FIELD_ACCESSIBILITY_CHANGED,
            path,
            new_f.modifiers_span or new_f.name_span,
            old_value=old_f.accessibility,
            new_value=new_f.accessibility,
        )
    if old_f.modifiers != new_f.modifiers:
        em.emit(
            ChangeKind.MODIFIER_SET_CHANGED,
            path,
            new_f.modifiers_span or new_f.name_span,
            old_value=modifier_set_text(old_f.modifiers),
            new_value=modifier_set_text(new_f.modifiers),
        )
    if old_f.type_text != new_f.type_text:
        em.emit(
            ChangeKind.FIELD_TYPE_CHANGED,
            path,
            new_f.type_span,
            old_value=old_f.type_text,
            new_value=new_f.type_text,
        )
    if old_f.initializer_text != new_f.initializer_text:
        em.emit(
            ChangeKind.FIELD_VALUE_CHANGED,
            path,
            new_f.initializer_span or new_f.name_span,
            old_value=old_f.initializer_text,
            new_value=new_f.initializer_text,
        )


# -- methods ----------------------------------------------------------------


def _diff_methods(
    em: _Emitter,
    project: str,
    file_path: str,
    chain: tuple[str, ...],
    old_cls: ClassDecl,
    new_cls: ClassDecl,
) -> None:
    old_by_key = {(m.name, m.arity): m for m in old_cls.methods}
    new_by_key = {(m.name, m.arity): m for m in new_cls.methods}

    unmatched_old = [m for m in old_cls.methods if (m.name, m.arity) not in new_by_key]
    unmatched_new = [m for m in new_cls.methods if (m.name, m.arity) not in old_by_key]

    for old_m in old_cls.methods:
        new_m = new_by_key.get((old_m.name, old_m.arity))
        if new_m is not None:
            _diff_method_pair(em, project, file_path, chain, old_m, new_m, renamed=False)

    # Second pass: same name, different arity (a parameter-list edit).
    still_old: list[MethodDecl] = []
    for old_m in unmatched_old:
        target = next((n for n in unmatched_new if n.name == old_m.name), None)
        if target is None:
            still_old.append(old_m)
            continue
        unmatched_new.remove(target)
        _diff_method_pair(em, project, file_path, chain, old_m, target, renamed=False)

    # Rename pass: identical param types, return type, and body
    # fingerprint; first unmatched old to first qualifying new.
    remaining: list[MethodDecl] = []
    for old_m in still_old:
        target = next(
            (
                n
                for n in unmatched_new
                if [p.type_text for p in n.params] == [p.type_text for p in old_m.params]
                and n.return_type_text == old_m.return_type_text
                and n.body_fingerprint == old_m.body_fingerprint
            ),
            None,
        )
        if target is None:
            remaining.append(old_m)
            continue
        unmatched_new.remove(target)
        _diff_method_pair(em, project, file_path, chain, old_m, target, renamed=True)

    for old_m in remaining:
        em.emit(
            ChangeKind.ELEMENT_REMOVED,
            _member_path(project, file_path, chain, "method", old_m.name, old_m.arity),
            new_cls.name_span,
            attributes=method_attrs(old_m),
        )
    for new_m in unmatched_new:
        em.emit(
            ChangeKind.ELEMENT_ADDED,
            _member_path(project, file_path, chain, "method", new_m.name, new_m.arity),
            new_m.name_span,
            attributes=method_attrs(new_m),
        )


def _diff_method_pair(
    em: _Emitter,
    project: str,
    file_path: str,
    chain: tuple[str, ...],
    old_m: MethodDecl,
    new_m: MethodDecl,
    renamed: bool,
) -> None:
    path = _member_path(project, file_path, chain, "method", new_m.name, new_m.arity)
    arities = {"oldArity": str(old_m.arity), "newArity": str(new_m.arity)}
    if renamed:
        em.emit(
            ChangeKind.METHOD_RENAMED,
            path,
            new_m.name_span,
            old_value=old_m.name,
            new_value=new_m.name,
        )
    if old_m.accessibility != new_m.accessibility:
        em.emit(
            ChangeKind.METHOD_ACCESSIBILITY_CHANGED,
            path,
            new_m.modifiers_span or new_m.name_span,
            old_value=old_m.accessibility,
            new_value=new_m.accessibility,
        )
    if old_m.modifiers != new_m.modifiers:
        em.emit(
            ChangeKind.MODIFIER_SET_CHANGED,
            path,
            new_m.modifiers_span or new_m.name_span,
            old_value=modifier_set_text(old_m.modifiers),
            new_value=modifier_set_text(new_m.modifiers),
        )
    if old_m.return_type_text != new_m.return_type_text:
        em.emit(
            ChangeKind.METHOD_RETURN_TYPE_CHANGED,
            path,
            new_m.return_type_span or new_m.name_span,
            old_value=old_m.return_type_text,
            new_value=new_m.return_type_text,
        )
    if old_m.body_fingerprint != new_m.body_fingerprint:
        em.emit(
            ChangeKind.METHOD_BODY_CHANGED,
            path,
            new_m.body_span or new_m.name_span,
            old_fingerprint=old_m.body_fingerprint,
            new_fingerprint=new_m.body_fingerprint,
        )

    shared = min(old_m.arity, new_m.arity)
    for i in range(shared):
        old_p, new_p = old_m.params[i], new_m.params[i]
        if old_p.name != new_p.name:
            em.emit(
                ChangeKind.PARAM_RENAMED,
                path.with_param(new_p.name),
                new_p.name_span,
                old_value=old_p.name,
                new_value=new_p.name,
                attributes={"paramIndex": str(i), **arities},
            )
        if old_p.type_text != new_p.type_text:
            em.emit(
                ChangeKind.PARAM_TYPE_CHANGED,
                path.with_param(new_p.name),
                new_p.type_span,
                old_value=old_p.type_text,
                new_value=new_p.type_text,
                attributes={"paramIndex": str(i), **arities},
            )
    for i in range(shared, old_m.arity):
        old_p = old_m.params[i]
        em.emit(
            ChangeKind.PARAM_REMOVED,
            path.with_param(old_p.name),
            new_m.name_span,
            old_value=f"{old_p.type_text} {old_p.name}",
            attributes={
                "paramIndex": str(i),
                "paramType": old_p.type_text,
                "paramName": old_p.name,
                **arities,
            },
        )
    for i in range(shared, new_m.arity):
        new_p = new_m.params[i]
        em.emit(
            ChangeKind.PARAM_ADDED,
            path.with_param(new_p.name),
            new_p.span,
            new_value=f"{new_p.type_text} {new_p.name}",
            attributes={
                "paramIndex": str(i),
                "paramType": new_p.type_text,
                "paramName": new_p.name,
                **arities,
            },
        )


# -- consolidation ----------------------------------------------------------
#
# Replays changes in seq order, one entry per element, one value group per
# attribute. A group survives when its first old value differs from its
# latest new value. Entries follow renames and arity shifts, so a change
# recorded against an older identity still lands on the right element.

_ABSENT = None  # param slot state: None = absent, (type, name) = present

# Group keys: ("name",) ("access",) ("mods",) ("rtype",) ("ftype",)
# ("value",) ("body",) ("pname", i) ("ptype", i) ("pexist", i)

_SIMPLE_GROUPS = {
    ChangeKind.METHOD_ACCESSIBILITY_CHANGED: ("access",),
    ChangeKind.FIELD_ACCESSIBILITY_CHANGED: ("access",),
    ChangeKind.MODIFIER_SET_CHANGED: ("mods",),
    ChangeKind.METHOD_RETURN_TYPE_CHANGED: ("rtype",),
    ChangeKind.FIELD_TYPE_CHANGED: ("ftype",),
    ChangeKind.FIELD_VALUE_CHANGED: ("value",),
}

_GROUP_ATTR = {
    ("access",): "accessibility",
    ("mods",): "modifiers",
    ("rtype",): "returnType",
    ("ftype",): "type",
    ("value",): "initializer",
    ("body",): "bodyFingerprint",
}


@dataclass
class _Group:
    first_old: object
    cur_new: object
    first_seq: int
    span: Span
    at_millis: int
    param_name: Optional[str] = None  # current slot name, ptype groups only


@dataclass(eq=False)
class _Entry:
    original_path: SemanticPath
    current_path: SemanticPath
    kind: str  # "class" | "field" | "method"
    existed_initially: bool
    removed: bool = False
    removal_attrs: Optional[dict[str, str]] = None
    added_attrs: Optional[dict[str, str]] = None
    groups: dict[tuple, _Group] = field(default_factory=dict)
    event_seq: int = 0
    event_span: Span = ZERO_SPAN
    event_millis: int = 0


def consolidate(changes: ChangeSet, *, seq_start: int = 1) -> ChangeSet:
    """Collapse a change sequence to its net effect.

    Output changes are renumbered from seq_start in order of first
    contribution, so consolidate(consolidate(s)) == consolidate(s).
    """
    netted = _replay(list(changes.changes))
    out = []
    for idx, stub in enumerate(netted):
        kind, path, old_v, new_v, old_fp, new_fp, attrs, span, millis = stub[1:]
        out.append(
            SemanticChange(
                kind=kind,
                path=path,
                old_value=old_v,
                new_value=new_v,
                author=changes.author,
                base_revision=changes.base_revision,
                seq=seq_start + idx,
                at_millis=millis,
                decoration_span=span,
                old_fingerprint=old_fp,
                new_fingerprint=new_fp,
                attributes=attrs,
            )
        )
    return ChangeSet(author=changes.author, base_revision=changes.base_revision, changes=tuple(out))


def fold(stored: Optional[ChangeSet], delta: ChangeSet) -> ChangeSet:
    """Fold a fresh delta onto an already consolidated view."""
    if stored is None:
        return consolidate(delta)
    # A purge can leave seq gaps in the stored set, so continue after
    # its max seq, not its length.
    start = (stored.changes[-1].seq if stored.changes else 0) + 1
    combined = list(stored.changes) + [
        c.with_seq(start + i) for i, c in enumerate(delta.changes)
    ]
    merged = ChangeSet(
        author=delta.author, base_revision=delta.base_revision, changes=tuple(combined)
    )
    return consolidate(merged)


def _member_part(path: SemanticPath) -> SemanticPath:
    return path.with_param(None) if path.param is not None else path


def _entry_kind(path: SemanticPath) -> str:
    if path.member is None:
        return "class"
    return path.member.kind


class _Ledger:
    def __init__(self) -> None:
        self.live: dict[SemanticPath, _Entry] = {}
        self.parked: list[_Entry] = []  # removed entries, keyed off the map

    def find_live(self, *candidates: SemanticPath) -> Optional[_Entry]:
        for p in candidates:
            entry = self.live.get(p)
            if entry is not None:
                return entry
        return None

    def find_parked(self, path: SemanticPath) -> Optional[_Entry]:
        for entry in self.parked:
            if entry.current_path == path:
                return entry
        return None

    def rekey(self, entry: _Entry, new_path: SemanticPath) -> None:
        if entry.current_path in self.live and self.live[entry.current_path] is entry:
            del self.live[entry.current_path]
        entry.current_path = new_path
        self.live[new_path] = entry

    def create(self, original: SemanticPath, current: SemanticPath, existed: bool) -> _Entry:
        entry = _Entry(
            original_path=original,
            current_path=current,
            kind=_entry_kind(current),
            existed_initially=existed,
        )
        self.live[current] = entry
        return entry


def _set_group(
    entry: _Entry,
    key: tuple,
    old: object,
    new: object,
    c: SemanticChange,
    param_name: Optional[str] = None,
) -> None:
    g = entry.groups.get(key)
    if g is None:
        entry.groups[key] = _Group(old, new, c.seq, c.decoration_span, c.at_millis, param_name)
    else:
        g.cur_new = new
        g.span = c.decoration_span
        g.at_millis = c.at_millis
        if param_name is not None:
            g.param_name = param_name


def _seed_groups_from_attrs(
    entry: _Entry, old_attrs: dict[str, str], new_attrs: dict[str, str], c: SemanticChange
) -> None:
    """Reset an entry's groups to the diff between two snapshots.

    Used when an element is re-added after a removal: the survivors are
    whatever differs between the pre-removal state and the new one.
    """
    entry.groups = {}
    simple = {"accessibility": ("access",), "modifiers": ("mods",), "returnType": ("rtype",)}
    if entry.kind == "field":
        simple = {
            "accessibility": ("access",),
            "modifiers": ("mods",),
            "type": ("ftype",),
            "initializer": ("value",),
        }
    elif entry.kind == "class":
        simple = {"modifiers": ("mods",)}
    for attr, key in simple.items():
        _set_group(entry, key, old_attrs.get(attr), new_attrs.get(attr), c)
    if entry.kind == "method":
        old_fp = old_attrs.get("bodyFingerprint")
        new_fp = new_attrs.get("bodyFingerprint")
        _set_group(
            entry,
            ("body",),
            int(old_fp, 16) if old_fp else None,
            int(new_fp, 16) if new_fp else None,
            c,
        )
        old_params = decode_params(old_attrs.get("params", "[]"))
        new_params = decode_params(new_attrs.get("params", "[]"))
        shared = min(len(old_params), len(new_params))
        for i in range(shared):
            _set_group(entry, ("pname", i), old_params[i][1], new_params[i][1], c)
            _set_group(
                entry, ("ptype", i), old_params[i][0], new_params[i][0], c,
                param_name=new_params[i][1],
            )
        for i in range(shared, len(old_params)):
            _set_group(entry, ("pexist", i), old_params[i], _ABSENT, c)
        for i in range(shared, len(new_params)):
            _set_group(entry, ("pexist", i), _ABSENT, new_params[i], c)


def _patch_added_params(entry: _Entry, mutate) -> None:
    params = decode_params(entry.added_attrs.get("params", "[]"))
    mutate(params)
    entry.added_attrs["params"] = encode_params(params)


def _apply_param_change(ledger: _Ledger, c: SemanticChange) -> _Entry:
    attrs = dict(c.attributes or {})
    i = int(attrs["paramIndex"])
    member = _member_part(c.path)
    pre_member = member
    if "oldArity" in attrs:
        pre_member = member.with_member_arity(int(attrs["oldArity"]))
    entry = ledger.find_live(member, pre_member)
    if entry is None:
        entry = ledger.create(pre_member, pre_member, existed=True)

    if entry.added_attrs is not None:
        # Element appeared within this window: fold the edit into its
        # snapshot instead of tracking a group.
        if c.kind == ChangeKind.PARAM_RENAMED:
            _patch_added_params(entry, lambda ps: ps.__setitem__(i, (ps[i][0], c.new_value)))
        elif c.kind == ChangeKind.PARAM_TYPE_CHANGED:
            _patch_added_params(entry, lambda ps: ps.__setitem__(i, (c.new_value, ps[i][1])))
        elif c.kind == ChangeKind.PARAM_ADDED:
            _patch_added_params(entry, lambda ps: ps.append((attrs["paramType"], attrs["paramName"])))
        elif c.kind == ChangeKind.PARAM_REMOVED:
            _patch_added_params(entry, lambda ps: ps.pop())
        ledger.rekey(entry, member)
        return entry

    if c.kind in (ChangeKind.PARAM_RENAMED, ChangeKind.PARAM_TYPE_CHANGED):
        exist = entry.groups.get(("pexist", i))
        if exist is not None and isinstance(exist.cur_new, tuple):
            t, n = exist.cur_new
            if c.kind == ChangeKind.PARAM_RENAMED:
                exist.cur_new = (t, c.new_value)
            else:
                exist.cur_new = (c.new_value, n)
            exist.span = c.decoration_span
            exist.at_millis = c.at_millis
        elif c.kind == ChangeKind.PARAM_RENAMED:
            _set_group(entry, ("pname", i), c.old_value, c.new_value, c)
            pt = entry.groups.get(("ptype", i))
            if pt is not None:
                pt.param_name = c.new_value
        else:
            _set_group(entry, ("ptype", i), c.old_value, c.new_value, c, param_name=c.path.param)
    elif c.kind == ChangeKind.PARAM_ADDED:
        slot = (attrs["paramType"], attrs["paramName"])
        exist = entry.groups.get(("pexist", i))
        if exist is None:
            _set_group(entry, ("pexist", i), _ABSENT, slot, c)
        else:
            exist.cur_new = slot
            exist.span = c.decoration_span
            exist.at_millis = c.at_millis
    elif c.kind == ChangeKind.PARAM_REMOVED:
        exist = entry.groups.get(("pexist", i))
        if exist is None:
            _set_group(entry, ("pexist", i), (attrs["paramType"], attrs["paramName"]), _ABSENT, c)
        else:
            exist.cur_new = _ABSENT
            exist.span = c.decoration_span
            exist.at_millis = c.at_millis
            if exist.first_old is _ABSENT:
                del entry.groups[("pexist", i)]
                entry.groups.pop(("pname", i), None)
                entry.groups.pop(("ptype", i), None)
    ledger.rekey(entry, member)
    return entry


def _replay(changes: list[SemanticChange]) -> list[tuple]:
    ledger = _Ledger()
    order: list[_Entry] = []  # first-touch order for deterministic emission

    def touch(entry: _Entry) -> _Entry:
        if entry not in order:
            order.append(entry)
        return entry

    for c in changes:
        if c.kind == ChangeKind.ELEMENT_ADDED:
            entry = ledger.find_parked(c.path)
            if entry is not None:
                ledger.parked.remove(entry)
                base = _base_attrs(entry)
                entry.removed = False
                entry.removal_attrs = None
                ledger.live[entry.current_path] = entry
                _seed_groups_from_attrs(entry, base, dict(c.attributes or {}), c)
            else:
                entry = ledger.find_live(c.path)
                if entry is None:
                    entry = ledger.create(c.path, c.path, existed=False)
                entry.added_attrs = dict(c.attributes or {})
                entry.event_seq = c.seq
                entry.event_span = c.decoration_span
                entry.event_millis = c.at_millis
            touch(entry)
        elif c.kind == ChangeKind.ELEMENT_REMOVED:
            entry = ledger.find_live(c.path)
            if entry is None:
                entry = ledger.create(c.path, c.path, existed=True)
            touch(entry)
            if not entry.existed_initially:
                # Added then removed inside the window: nothing happened.
                del ledger.live[entry.current_path]
                order.remove(entry)
                continue
            entry.removed = True
            entry.removal_attrs = dict(c.attributes or {})
            entry.event_seq = c.seq
            entry.event_span = c.decoration_span
            entry.event_millis = c.at_millis
            del ledger.live[entry.current_path]
            ledger.parked.append(entry)
        elif c.kind in (ChangeKind.METHOD_RENAMED, ChangeKind.FIELD_RENAMED):
            pre = c.path.with_member_name(c.old_value)
            entry = ledger.find_live(pre, c.path)
            if entry is None:
                entry = ledger.create(pre, pre, existed=True)
            touch(entry)
            if entry.added_attrs is not None:
                ledger.rekey(entry, c.path)
                continue
            _set_group(entry, ("name",), c.old_value, c.new_value, c)
            ledger.rekey(entry, c.path)
        elif c.kind in (
            ChangeKind.PARAM_RENAMED,
            ChangeKind.PARAM_TYPE_CHANGED,
            ChangeKind.PARAM_ADDED,
            ChangeKind.PARAM_REMOVED,
        ):
            touch(_apply_param_change(ledger, c))
        elif c.kind == ChangeKind.METHOD_BODY_CHANGED:
            entry = ledger.find_live(c.path)
            if entry is None:
                entry = ledger.create(c.path, c.path, existed=True)
            touch(entry)
            if entry.added_attrs is not None:
                entry.added_attrs["bodyFingerprint"] = fingerprint_hex(c.new_fingerprint)
                continue
            _set_group(entry, ("body",), c.old_fingerprint, c.new_fingerprint, c)
        else:
            key = _SIMPLE_GROUPS[c.kind]
            entry = ledger.find_live(c.path)
            if entry is None:
                entry = ledger.create(c.path, c.path, existed=True)
            touch(entry)
            if entry.added_attrs is not None:
                attr = _GROUP_ATTR[key]
                if c.new_value is None:
                    entry.added_attrs.pop(attr, None)
                else:
                    entry.added_attrs[attr] = c.new_value
                continue
            _set_group(entry, key, c.old_value, c.new_value, c)

    stubs: list[tuple] = []
    counter = 0
    for entry in order:
        for stub in _emit_entry(entry):
            stubs.append((stub[0], counter) + stub[1:])
            counter += 1
    # Sort by first-contribution seq, then by generation order.
    stubs.sort(key=lambda s: (s[0], s[1]))
    return [(s[0],) + s[2:] for s in stubs]


def _base_attrs(entry: _Entry) -> dict[str, str]:
    """Reconstruct the element's attributes as of the window start."""
    attrs = dict(entry.removal_attrs or {})
    param_first: dict[int, object] = {}
    pname_first: dict[int, str] = {}
    ptype_first: dict[int, str] = {}
    for key, g in entry.groups.items():
        if key[0] == "pexist":
            param_first[key[1]] = g.first_old
        elif key[0] == "pname":
            pname_first[key[1]] = g.first_old
        elif key[0] == "ptype":
            ptype_first[key[1]] = g.first_old
        else:
            attr = "name" if key[0] == "name" else _GROUP_ATTR[key]
            if key[0] == "body":
                attrs["bodyFingerprint"] = fingerprint_hex(g.first_old)
            elif attr != "name":
                if g.first_old is None:
                    attrs.pop(attr, None)
                else:
                    attrs[attr] = g.first_old
    if entry.kind == "method":
        current = decode_params(attrs.get("params", "[]"))
        width = max(
            [len(current)]
            + [i + 1 for i in list(param_first) + list(pname_first) + list(ptype_first)]
        )
        base: list[tuple[str, str]] = []
        for i in range(width):
            if i in param_first:
                slot = param_first[i]
                if slot is _ABSENT:
                    continue
                t, n = slot
            elif i < len(current):
                t, n = current[i]
            else:
                continue
            base.append((ptype_first.get(i, t), pname_first.get(i, n)))
        attrs["params"] = encode_params(base)
    return attrs


def _emit_entry(entry: _Entry) -> list[tuple]:
    """Yield stubs: (first_seq, kind, path, oldV, newV, oldFp, newFp, attrs, span, millis)."""
    out: list[tuple] = []
    if entry.added_attrs is not None:
        out.append(
            (
                entry.event_seq,
                ChangeKind.ELEMENT_ADDED,
                entry.current_path,
                None,
                None,
                None,
                None,
                dict(entry.added_attrs),
                entry.event_span,
                entry.event_millis,
            )
        )
        return out
    if entry.removed:
        out.append(
            (
                entry.event_seq,
                ChangeKind.ELEMENT_REMOVED,
                entry.original_path,
                None,
                None,
                None,
                None,
                _base_attrs(entry),
                entry.event_span,
                entry.event_millis,
            )
        )
        return out

    path = entry.current_path
    old_arity = entry.original_path.member.arity if entry.kind == "method" else None
    new_arity = path.member.arity if entry.kind == "method" else None

    def simple(g: _Group, kind: ChangeKind) -> None:
        out.append(
            (g.first_seq, kind, path, g.first_old, g.cur_new, None, None, None, g.span, g.at_millis)
        )

    name = entry.groups.get(("name",))
    if name is not None and name.first_old != name.cur_new:
        kind = ChangeKind.METHOD_RENAMED if entry.kind == "method" else ChangeKind.FIELD_RENAMED
        simple(name, kind)
    g = entry.groups.get(("access",))
    if g is not None and g.first_old != g.cur_new:
        kind = (
            ChangeKind.METHOD_ACCESSIBILITY_CHANGED
            if entry.kind == "method"
            else ChangeKind.FIELD_ACCESSIBILITY_CHANGED
        )
        simple(g, kind)
    g = entry.groups.get(("mods",))
    if g is not None and g.first_old != g.cur_new:
        simple(g, ChangeKind.MODIFIER_SET_CHANGED)
    g = entry.groups.get(("rtype",))
    if g is not None and g.first_old != g.cur_new:
        simple(g, ChangeKind.METHOD_RETURN_TYPE_CHANGED)
    g = entry.groups.get(("ftype",))
    if g is not None and g.first_old != g.cur_new:
        simple(g, ChangeKind.FIELD_TYPE_CHANGED)
    g = entry.groups.get(("value",))
    if g is not None and g.first_old != g.cur_new:
        simple(g, ChangeKind.FIELD_VALUE_CHANGED)
    g = entry.groups.get(("body",))
    if g is not None and g.first_old != g.cur_new:
        out.append(
            (
                g.first_seq,
                ChangeKind.METHOD_BODY_CHANGED,
                path,
                None,
                None,
                g.first_old,
                g.cur_new,
                None,
                g.span,
                g.at_millis,
            )
        )

    arities = {"oldArity": str(old_arity), "newArity": str(new_arity)}
    positions = sorted({key[1] for key in entry.groups if key[0].startswith("p")})
    for i in positions:
        exist = entry.groups.get(("pexist", i))
        pname = entry.groups.get(("pname", i))
        ptype = entry.groups.get(("ptype", i))
        idx = {"paramIndex": str(i)}
        if exist is not None:
            first, cur = exist.first_old, exist.cur_new
            if first is not _ABSENT:
                # Fold earlier per-slot edits back into the original state.
                t, n = first
                first = (ptype.first_old if ptype else t, pname.first_old if pname else n)
            if first is _ABSENT and cur is not _ABSENT:
                t, n = cur
                out.append(
                    (
                        exist.first_seq,
                        ChangeKind.PARAM_ADDED,
                        path.with_param(n),
                        None,
                        f"{t} {n}",
                        None,
                        None,
                        {**idx, "paramType": t, "paramName": n, **arities},
                        exist.span,
                        exist.at_millis,
                    )
                )
            elif first is not _ABSENT and cur is _ABSENT:
                t, n = first
                out.append(
                    (
                        exist.first_seq,
                        ChangeKind.PARAM_REMOVED,
                        path.with_param(n),
                        f"{t} {n}",
                        None,
                        None,
                        None,
                        {**idx, "paramType": t, "paramName": n, **arities},
                        exist.span,
                        exist.at_millis,
                    )
                )
            elif first is not _ABSENT and cur is not _ABSENT:
                (ot, on), (nt, nn) = first, cur
                if on != nn:
                    out.append(
                        (
                            exist.first_seq,
                            ChangeKind.PARAM_RENAMED,
                            path.with_param(nn),
                            on,
                            nn,
                            None,
                            None,
                            {**idx, **arities},
                            exist.span,
                            exist.at_millis,
                        )
                    )
                if ot != nt:
                    out.append(
                        (
                            exist.first_seq,
                            ChangeKind.PARAM_TYPE_CHANGED,
                            path.with_param(nn),
                            ot,
                            nt,
                            None,
                            None,
                            {**idx, **arities},
                            exist.span,
                            exist.at_millis,
                        )
                    )
            continue
        if pname is not None and pname.first_old != pname.cur_new:
            out.append(
                (
                    pname.first_seq,
                    ChangeKind.PARAM_RENAMED,
                    path.with_param(pname.cur_new),
                    pname.first_old,
                    pname.cur_new,
                    None,
                    None,
                    {**idx, **arities},
                    pname.span,
                    pname.at_millis,
                )
            )
        if ptype is not None and ptype.first_old != ptype.cur_new:
            cur_name = pname.cur_new if pname is not None else ptype.param_name
            out.append(
                (
                    ptype.first_seq,
                    ChangeKind.PARAM_TYPE_CHANGED,
                    path.with_param(cur_name),
                    ptype.first_old,
                    ptype.cur_new,
                    None,
                    None,
                    {**idx, **arities},
                    ptype.span,
                    ptype.at_millis,
                )
            )
    return out


# -- rename aliases -----------------------------------------------------------


def rename_aliases(consolidated: ChangeSet) -> list[RenameAlias]:
    """Derive identity aliases from a consolidated change set.

    One alias per surviving rename, plus one per method whose arity
    shifted, recorded against the pre-rename name so detection can chase
    a chain of aliases back to the element's base identity.
    """
    aliases: list[RenameAlias] = []
    author = consolidated.author
    rename_old_name: dict[SemanticPath, str] = {}

    for c in consolidated.changes:
        if c.kind in (ChangeKind.METHOD_RENAMED, ChangeKind.FIELD_RENAMED):
            aliases.append(
                RenameAlias(
                    old_path=c.path.with_member_name(c.old_value),
                    new_path=c.path,
                    author=author,
                )
            )
            rename_old_name[c.path] = c.old_value
        elif c.kind == ChangeKind.PARAM_RENAMED:
            aliases.append(
                RenameAlias(
                    old_path=c.path.with_param(c.old_value),
                    new_path=c.path,
                    author=author,
                )
            )

    net: dict[SemanticPath, int] = {}
    for c in consolidated.changes:
        if c.kind in (ChangeKind.PARAM_ADDED, ChangeKind.PARAM_REMOVED):
            member = _member_part(c.path)
            net[member] = net.get(member, 0) + (1 if c.kind == ChangeKind.PARAM_ADDED else -1)
    for member, delta in net.items():
        if delta == 0:
            continue
        new_arity = member.member.arity
        old_arity = new_arity - delta
        base_name = rename_old_name.get(member, member.member.name)
        aliases.append(
            RenameAlias(
                old_path=member.with_member_name(base_name).with_member_arity(old_arity),
                new_path=member.with_member_name(base_name),
                author=author,
            )
        )
    return aliases


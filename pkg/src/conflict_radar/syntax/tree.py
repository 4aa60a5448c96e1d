"""Parsed semantic structure of one source file.

Only declaration-level structure is modeled: classes, fields, methods,
parameters. Method bodies are reduced to a fingerprint plus a span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .lexer import Span, fingerprint_hex

PACKAGE_PRIVATE = "package-private"


def modifier_set_text(modifiers: frozenset[str]) -> str:
    """Canonical text for a modifier set (sorted, space-joined)."""
    return " ".join(sorted(modifiers))


@dataclass(frozen=True)
class ParamDecl:
    type_text: str
    type_span: Span
    name: str
    name_span: Span

    @property
    def span(self) -> Span:
        return Span(
            self.type_span.start_byte,
            self.name_span.end_byte,
            self.type_span.start_line,
            self.type_span.start_col,
            self.name_span.end_line,
            self.name_span.end_col,
        )

    def to_json(self) -> dict:
        return {
            "typeText": self.type_text,
            "typeSpan": self.type_span.to_json(),
            "name": self.name,
            "nameSpan": self.name_span.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "ParamDecl":
        return ParamDecl(
            type_text=obj["typeText"],
            type_span=Span.from_json(obj["typeSpan"]),
            name=obj["name"],
            name_span=Span.from_json(obj["nameSpan"]),
        )


@dataclass(frozen=True)
class FieldDecl:
    name: str
    name_span: Span
    accessibility: str
    modifiers: frozenset[str]
    type_text: str
    type_span: Span
    initializer_text: Optional[str]
    initializer_span: Optional[Span]
    span: Span
    modifiers_span: Optional[Span] = None

    def to_json(self) -> dict:
        return {
            "kind": "field",
            "name": self.name,
            "nameSpan": self.name_span.to_json(),
            "accessibility": self.accessibility,
            "modifiers": sorted(self.modifiers),
            "modifiersSpan": self.modifiers_span.to_json() if self.modifiers_span else None,
            "typeText": self.type_text,
            "typeSpan": self.type_span.to_json(),
            "initializerText": self.initializer_text,
            "initializerSpan": self.initializer_span.to_json() if self.initializer_span else None,
            "span": self.span.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "FieldDecl":
        return FieldDecl(
            name=obj["name"],
            name_span=Span.from_json(obj["nameSpan"]),
            accessibility=obj["accessibility"],
            modifiers=frozenset(obj["modifiers"]),
            type_text=obj["typeText"],
            type_span=Span.from_json(obj["typeSpan"]),
            initializer_text=obj["initializerText"],
            initializer_span=(
                Span.from_json(obj["initializerSpan"]) if obj.get("initializerSpan") else None
            ),
            span=Span.from_json(obj["span"]),
            modifiers_span=(
                Span.from_json(obj["modifiersSpan"]) if obj.get("modifiersSpan") else None
            ),
        )


@dataclass(frozen=True)
class MethodDecl:
    name: str
    name_span: Span
    accessibility: str
    modifiers: frozenset[str]
    return_type_text: Optional[str]  # None for constructors
    return_type_span: Optional[Span]
    params: tuple[ParamDecl, ...]
    body_fingerprint: int
    body_span: Optional[Span]  # None for abstract bodies
    span: Span
    modifiers_span: Optional[Span] = None

    @property
    def arity(self) -> int:
        return len(self.params)

    def to_json(self) -> dict:
        return {
            "kind": "method",
            "name": self.name,
            "nameSpan": self.name_span.to_json(),
            "accessibility": self.accessibility,
            "modifiers": sorted(self.modifiers),
            "modifiersSpan": self.modifiers_span.to_json() if self.modifiers_span else None,
            "returnTypeText": self.return_type_text,
            "returnTypeSpan": self.return_type_span.to_json() if self.return_type_span else None,
            "params": [p.to_json() for p in self.params],
            "bodyFingerprint": fingerprint_hex(self.body_fingerprint),
            "bodySpan": self.body_span.to_json() if self.body_span else None,
            "span": self.span.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "MethodDecl":
        return MethodDecl(
            name=obj["name"],
            name_span=Span.from_json(obj["nameSpan"]),
            accessibility=obj["accessibility"],
            modifiers=frozenset(obj["modifiers"]),
            return_type_text=obj["returnTypeText"],
            return_type_span=(
                Span.from_json(obj["returnTypeSpan"]) if obj.get("returnTypeSpan") else None
            ),
            params=tuple(ParamDecl.from_json(p) for p in obj["params"]),
            body_fingerprint=int(obj["bodyFingerprint"], 16),
            body_span=Span.from_json(obj["bodySpan"]) if obj.get("bodySpan") else None,
            span=Span.from_json(obj["span"]),
            modifiers_span=(
                Span.from_json(obj["modifiersSpan"]) if obj.get("modifiersSpan") else None
            ),
        )


@dataclass(frozen=True)
class ClassDecl:
    name: str
    name_span: Span
    modifiers: frozenset[str]  # full set, access keywords included
    modifiers_span: Optional[Span]
    fields: tuple[FieldDecl, ...]
    methods: tuple[MethodDecl, ...]
    nested: tuple["ClassDecl", ...]
    span: Span

    def to_json(self) -> dict:
        return {
            "kind": "class",
            "name": self.name,
            "nameSpan": self.name_span.to_json(),
            "modifiers": sorted(self.modifiers),
            "modifiersSpan": self.modifiers_span.to_json() if self.modifiers_span else None,
            "fields": [f.to_json() for f in self.fields],
            "methods": [m.to_json() for m in self.methods],
            "nested": [c.to_json() for c in self.nested],
            "span": self.span.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "ClassDecl":
        return ClassDecl(
            name=obj["name"],
            name_span=Span.from_json(obj["nameSpan"]),
            modifiers=frozenset(obj["modifiers"]),
            modifiers_span=(
                Span.from_json(obj["modifiersSpan"]) if obj.get("modifiersSpan") else None
            ),
            fields=tuple(FieldDecl.from_json(f) for f in obj["fields"]),
            methods=tuple(MethodDecl.from_json(m) for m in obj["methods"]),
            nested=tuple(ClassDecl.from_json(c) for c in obj["nested"]),
            span=Span.from_json(obj["span"]),
        )


@dataclass(frozen=True)
class ElementTree:
    file_path: str
    classes: tuple[ClassDecl, ...] = field(default_factory=tuple)

    def walk_classes(self) -> Iterator[tuple[tuple[str, ...], ClassDecl]]:
        """Yield (class chain, decl) for every class, outermost first."""

        def _walk(chain: tuple[str, ...], decl: ClassDecl):
            full = chain + (decl.name,)
            yield full, decl
            for inner in decl.nested:
                yield from _walk(full, inner)

        for cls in self.classes:
            yield from _walk((), cls)

    def to_json(self) -> dict:
        return {
            "filePath": self.file_path,
            "classes": [c.to_json() for c in self.classes],
        }

    @staticmethod
    def from_json(obj: dict) -> "ElementTree":
        return ElementTree(
            file_path=obj["filePath"],
            classes=tuple(ClassDecl.from_json(c) for c in obj["classes"]),
        )

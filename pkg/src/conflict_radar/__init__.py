"""Fine-grained merge-conflict awareness for teams editing the same files.

Parses lightweight structural trees out of Java sources, distills edits
into semantic change records, and matches records across team members by
semantic path to surface potential conflicts while both sides are still
uncommitted.
"""

from .detect import (
    DetectOptions,
    GateResult,
    PathIndex,
    detect,
    purge_on_revert,
    resolve_base_identity,
    version_gate,
)
from .distill import MismatchedFile, RenameAlias, consolidate, extract_changes, fold, rename_aliases
from .syntax.lexer import LexError, Span, Token, TokenKind, body_fingerprint, fingerprint_hex, fnv1a_64, tokenize
from .model import (
    ChangeKind,
    ChangeSet,
    ConflictReport,
    MemberRef,
    SemanticChange,
    SemanticPath,
    Severity,
    canonical_json,
    pretty_json,
    render_path_id,
)
from .syntax.parser import ParseError, is_error_free, parse_unit
from .syntax.tree import ClassDecl, ElementTree, FieldDecl, MethodDecl, ParamDecl

__version__ = "0.1.0"

__all__ = [
    "ChangeKind",
    "ChangeSet",
    "ClassDecl",
    "ConflictReport",
    "DetectOptions",
    "ElementTree",
    "FieldDecl",
    "GateResult",
    "LexError",
    "MemberRef",
    "MethodDecl",
    "MismatchedFile",
    "ParamDecl",
    "ParseError",
    "PathIndex",
    "RenameAlias",
    "SemanticChange",
    "SemanticPath",
    "Severity",
    "Span",
    "Token",
    "TokenKind",
    "body_fingerprint",
    "canonical_json",
    "consolidate",
    "detect",
    "extract_changes",
    "fingerprint_hex",
    "fnv1a_64",
    "fold",
    "is_error_free",
    "parse_unit",
    "pretty_json",
    "purge_on_revert",
    "rename_aliases",
    "render_path_id",
    "resolve_base_identity",
    "tokenize",
    "version_gate",
]

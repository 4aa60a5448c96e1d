"""Tokenizer, structural parser, and body fingerprinting."""

from .lexer import (
    ACCESS_MODIFIERS,
    FNV_OFFSET_BASIS,
    FNV_PRIME,
    NON_ACCESS_MODIFIERS,
    ZERO_SPAN,
    LexError,
    Span,
    Token,
    TokenKind,
    body_fingerprint,
    fingerprint_hex,
    fnv1a_64,
    tokenize,
)
from .parser import ParseError, is_error_free, parse_unit
from .tree import (
    PACKAGE_PRIVATE,
    ClassDecl,
    ElementTree,
    FieldDecl,
    MethodDecl,
    ParamDecl,
    modifier_set_text,
)

__all__ = [
    "ACCESS_MODIFIERS",
    "FNV_OFFSET_BASIS",
    "FNV_PRIME",
    "NON_ACCESS_MODIFIERS",
    "PACKAGE_PRIVATE",
    "ZERO_SPAN",
    "ClassDecl",
    "ElementTree",
    "FieldDecl",
    "LexError",
    "MethodDecl",
    "ParamDecl",
    "ParseError",
    "Span",
    "Token",
    "TokenKind",
    "body_fingerprint",
    "fingerprint_hex",
    "fnv1a_64",
    "is_error_free",
    "modifier_set_text",
    "parse_unit",
    "tokenize",
]

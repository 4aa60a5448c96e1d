"""Tokenizer for the Java-like source subset, plus body fingerprinting.

Comments and whitespace are dropped during tokenization; every token
carries a span with UTF-8 byte offsets and 1-based line/column positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

# Byte inserted between token texts when hashing a method body; keeps
# "ab c" and "a bc" from colliding.
FINGERPRINT_SEPARATOR = b"\x1f"

KEYWORDS = frozenset(
    {
        "package",
        "import",
        "class",
        "interface",
        "enum",
        "record",
        "extends",
        "implements",
        "throws",
        "public",
        "protected",
        "private",
        "static",
        "final",
        "abstract",
        "synchronized",
        "native",
        "transient",
        "volatile",
        "strictfp",
        "default",
    }
)

ACCESS_MODIFIERS = frozenset({"public", "protected", "private"})

NON_ACCESS_MODIFIERS = frozenset(
    {
        "static",
        "final",
        "abstract",
        "synchronized",
        "native",
        "transient",
        "volatile",
        "strictfp",
        "default",
    }
)


class TokenKind(Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    PUNCTUATION = "punctuation"
    LITERAL = "literal"


@dataclass(frozen=True)
class Span:
    """Half-open source range; end_* name the position just past the text."""

    start_byte: int
    end_byte: int
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def contains(self, other: "Span") -> bool:
        return self.start_byte <= other.start_byte and other.end_byte <= self.end_byte

    def to_json(self) -> dict:
        return {
            "startByte": self.start_byte,
            "endByte": self.end_byte,
            "startLine": self.start_line,
            "startCol": self.start_col,
            "endLine": self.end_line,
            "endCol": self.end_col,
        }

    @staticmethod
    def from_json(obj: dict) -> "Span":
        return Span(
            start_byte=obj["startByte"],
            end_byte=obj["endByte"],
            start_line=obj["startLine"],
            start_col=obj["startCol"],
            end_line=obj["endLine"],
            end_col=obj["endCol"],
        )


ZERO_SPAN = Span(0, 0, 1, 1, 1, 1)


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind
    span: Span


class LexError(Exception):
    """Unterminated string/char/comment; carries the offending span."""

    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at line {span.start_line}, col {span.start_col}")
        self.message = message
        self.span = span


def fnv1a_64(data: bytes) -> int:
    """FNV-1a 64-bit hash; bit-exact on every platform."""
    h = FNV_OFFSET_BASIS
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & _MASK64
    return h


def body_fingerprint(body_tokens: Sequence[Token]) -> int:
    """Hash a method body's token texts, whitespace/comment invariant.

    An empty token sequence (abstract body) hashes to the FNV offset basis.
    """
    data = FINGERPRINT_SEPARATOR.join(t.text.encode("utf-8") for t in body_tokens)
    return fnv1a_64(data)


def fingerprint_hex(value: int | None) -> str | None:
    """Render a fingerprint as a fixed-width hex string for wire/JSON use."""
    if value is None:
        return None
    return f"{value:016x}"


class _Cursor:
    """Tracks character index, UTF-8 byte offset, and line/col together."""

    __slots__ = ("source", "index", "byte", "line", "col")

    def __init__(self, source: str):
        self.source = source
        self.index = 0
        self.byte = 0
        self.line = 1
        self.col = 1

    def eof(self) -> bool:
        return self.index >= len(self.source)

    def peek(self, ahead: int = 0) -> str:
        i = self.index + ahead
        return self.source[i] if i < len(self.source) else ""

    def advance(self) -> str:
        ch = self.source[self.index]
        self.index += 1
        self.byte += len(ch.encode("utf-8")) if ord(ch) > 0x7F else 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def mark(self) -> tuple[int, int, int]:
        return (self.byte, self.line, self.col)

    def span_from(self, mark: tuple[int, int, int]) -> Span:
        return Span(mark[0], self.byte, mark[1], mark[2], self.line, self.col)


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def tokenize(source: str) -> list[Token]:
    """Tokenize, dropping comments and whitespace.

    Raises LexError for unterminated string, char, or block-comment
    constructs; any other character becomes a one-char punctuation token.
    """
    cur = _Cursor(source)
    tokens: list[Token] = []

    while not cur.eof():
        ch = cur.peek()

        if ch in " \t\r\n\f":
            cur.advance()
            continue

        if ch == "/" and cur.peek(1) == "/":
            while not cur.eof() and cur.peek() != "\n":
                cur.advance()
            continue

        if ch == "/" and cur.peek(1) == "*":
            mark = cur.mark()
            cur.advance()
            cur.advance()
            closed = False
            while not cur.eof():
                if cur.peek() == "*" and cur.peek(1) == "/":
                    cur.advance()
                    cur.advance()
                    closed = True
                    break
                cur.advance()
            if not closed:
                raise LexError("unterminated block comment", cur.span_from(mark))
            continue

        mark = cur.mark()

        if ch in "\"'":
            quote = ch
            start_index = cur.index
            cur.advance()
            closed = False
            while not cur.eof():
                c = cur.peek()
                if c == "\n":
                    break
                cur.advance()
                if c == "\\" and not cur.eof():
                    cur.advance()
                elif c == quote:
                    closed = True
                    break
            if not closed:
                raise LexError(
                    "unterminated string literal" if quote == '"' else "unterminated char literal",
                    cur.span_from(mark),
                )
            tokens.append(
                Token(source[start_index : cur.index], TokenKind.LITERAL, cur.span_from(mark))
            )
            continue

        if ch.isdigit():
            start_index = cur.index
            cur.advance()
            while not cur.eof() and (_is_ident_part(cur.peek()) or cur.peek() == "."):
                cur.advance()
            tokens.append(
                Token(source[start_index : cur.index], TokenKind.LITERAL, cur.span_from(mark))
            )
            continue

        if _is_ident_start(ch):
            start_index = cur.index
            cur.advance()
            while not cur.eof() and _is_ident_part(cur.peek()):
                cur.advance()
            text = source[start_index : cur.index]
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(text, kind, cur.span_from(mark)))
            continue

        cur.advance()
        tokens.append(Token(ch, TokenKind.PUNCTUATION, cur.span_from(mark)))

    return tokens

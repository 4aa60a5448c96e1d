"""Tokenizer and fingerprint tests.

Fingerprint constants below were computed with a standalone FNV-1a
implementation (byte fold over 0x1f-joined token texts) before the
package existed; they pin the hash layout for the wire format.
"""

import pytest

from conflict_radar.syntax.lexer import (
    FNV_OFFSET_BASIS,
    LexError,
    Span,
    TokenKind,
    body_fingerprint,
    fingerprint_hex,
    fnv1a_64,
    tokenize,
)


class _Tok:
    def __init__(self, text):
        self.text = text


def fp(texts):
    return body_fingerprint([_Tok(t) for t in texts])


def test_fnv_empty_is_offset_basis():
    assert fnv1a_64(b"") == 0xCBF29CE484222325 == FNV_OFFSET_BASIS


def test_fnv_known_value():
    assert fnv1a_64(b"hello") == 0xA430D84680AABD0B


def test_fingerprint_frozen_values():
    assert fp(["{", "}"]) == 0xC6C1DA198379D9C6
    assert fp(["{", "int", "a", ";", "}"]) == 0x4F5B86A74DE832AA
    assert fp(["{", "int", "b", ";", "}"]) == 0x23FA289B731F18DF


def test_fingerprint_ignores_formatting_but_not_token_splits():
    # "ab c" and "a bc" differ even though the concatenation matches.
    assert fp(["ab", "c"]) != fp(["a", "bc"])
    assert fp([]) == FNV_OFFSET_BASIS


def test_fingerprint_hex_is_sixteen_digits():
    assert fingerprint_hex(0xC6C1DA198379D9C6) == "c6c1da198379d9c6"
    assert fingerprint_hex(5) == "0000000000000005"
    assert fingerprint_hex(None) is None


def test_tokenize_kinds():
    toks = tokenize("public int x = 42;")
    assert [(t.text, t.kind) for t in toks] == [
        ("public", TokenKind.KEYWORD),
        ("int", TokenKind.IDENTIFIER),
        ("x", TokenKind.IDENTIFIER),
        ("=", TokenKind.PUNCTUATION),
        ("42", TokenKind.LITERAL),
        (";", TokenKind.PUNCTUATION),
    ]


def test_tokenize_skips_comments_and_whitespace():
    src = "int a; // trailing\n/* block\nspanning */ int b;"
    assert [t.text for t in tokenize(src)] == ["int", "a", ";", "int", "b", ";"]


def test_tokenize_string_and_char_literals():
    toks = tokenize('String s = "a // not a comment \\" end"; char c = \'{\';')
    texts = [t.text for t in toks]
    assert '"a // not a comment \\" end"' in texts
    assert "'{'" in texts


def test_tokenize_spans_track_lines_and_bytes():
    toks = tokenize("int a;\nint b;")
    b = next(t for t in toks if t.text == "b")
    assert b.span.start_line == 2
    assert b.span.start_col == 5
    assert b.span.start_byte == 11
    assert b.span.end_byte == 12


def test_tokenize_multibyte_offsets_are_bytes():
    # 'ü' is two bytes in UTF-8, so the semicolon starts at byte 9.
    toks = tokenize('int u = "ü";')
    semi = toks[-1]
    assert semi.text == ";"
    assert semi.span.start_byte == len('int u = "ü"'.encode("utf-8"))


def test_unterminated_string_raises():
    with pytest.raises(LexError):
        tokenize('String s = "oops;')


def test_unterminated_block_comment_raises():
    with pytest.raises(LexError):
        tokenize("int a; /* never closed")


def test_span_contains():
    outer = Span(0, 10, 1, 1, 1, 11)
    inner = Span(2, 5, 1, 3, 1, 6)
    assert outer.contains(inner)
    assert not inner.contains(outer)


def test_span_json_round_trip():
    s = Span(3, 9, 1, 4, 2, 2)
    assert Span.from_json(s.to_json()) == s

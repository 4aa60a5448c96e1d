"""Recursive-descent parser producing an ElementTree from source text.

Grammar subset: optional package declaration, import lines, class
declarations (modifiers, extends/implements consumed), fields, methods,
constructors, nested classes. Annotations are consumed and ignored.
Method bodies are captured as balanced token streams and fingerprinted,
never parsed into statements.

A successful parse is the error-free gate: any ParseError (or LexError)
marks the workspace state not-error-free.
"""

from __future__ import annotations

from typing import Optional

from .lexer import (
    ACCESS_MODIFIERS,
    NON_ACCESS_MODIFIERS,
    LexError,
    Span,
    Token,
    TokenKind,
    body_fingerprint,
    tokenize,
)
from .tree import PACKAGE_PRIVATE, ClassDecl, ElementTree, FieldDecl, MethodDecl, ParamDecl


class ParseError(Exception):
    """Syntax error with the span of the offending token."""

    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at line {span.start_line}, col {span.start_col}")
        self.message = message
        self.span = span


def _join_span(start: Span, end: Span) -> Span:
    return Span(
        start.start_byte,
        end.end_byte,
        start.start_line,
        start.start_col,
        end.end_line,
        end.end_col,
    )


def _type_text(tokens: list[Token]) -> str:
    return " ".join(t.text for t in tokens)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------

    def _eof_span(self) -> Span:
        if self.tokens:
            last = self.tokens[-1].span
            return Span(
                last.end_byte, last.end_byte, last.end_line, last.end_col, last.end_line, last.end_col
            )
        return Span(0, 0, 1, 1, 1, 1)

    def peek(self, ahead: int = 0) -> Optional[Token]:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def at_kind(self, kind: TokenKind) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of file", self._eof_span())
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected '{text}'", self._eof_span())
        if tok.text != text:
            raise ParseError(f"expected '{text}', found '{tok.text}'", tok.span)
        self.pos += 1
        return tok

    def expect_identifier(self, what: str) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {what}", self._eof_span())
        if tok.kind != TokenKind.IDENTIFIER:
            raise ParseError(f"expected {what}, found '{tok.text}'", tok.span)
        self.pos += 1
        return tok

    # -- skipped constructs -------------------------------------------

    def skip_annotations(self) -> None:
        while self.at("@"):
            self.advance()
            self.expect_identifier("annotation name")
            while self.at("."):
                self.advance()
                self.expect_identifier("annotation name")
            if self.at("("):
                self.skip_balanced("(", ")")

    def skip_balanced(self, open_text: str, close_text: str) -> None:
        opener = self.expect(open_text)
        depth = 1
        while depth > 0:
            tok = self.peek()
            if tok is None:
                raise ParseError(f"unbalanced '{open_text}'", opener.span)
            self.advance()
            if tok.text == open_text:
                depth += 1
            elif tok.text == close_text:
                depth -= 1

    def skip_qualified_name(self) -> None:
        self.expect_identifier("name")
        while self.at("."):
            self.advance()
            if self.at("*"):
                self.advance()
                return
            self.expect_identifier("name")

    # -- modifiers ----------------------------------------------------

    def parse_modifiers(self) -> tuple[frozenset[str], Optional[str], Optional[Span]]:
        """Collect modifier keywords; returns (all, access, region span)."""
        seen: list[Token] = []
        access: Optional[str] = None
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.KEYWORD:
                break
            if tok.text in ACCESS_MODIFIERS:
                if access is not None:
                    raise ParseError(f"duplicate access modifier '{tok.text}'", tok.span)
                access = tok.text
            elif tok.text in NON_ACCESS_MODIFIERS:
                if any(s.text == tok.text for s in seen):
                    raise ParseError(f"duplicate modifier '{tok.text}'", tok.span)
            else:
                break
            seen.append(self.advance())
        span = _join_span(seen[0].span, seen[-1].span) if seen else None
        return frozenset(t.text for t in seen), access, span

    # -- types ----------------------------------------------------------

    def parse_type_tokens(self) -> list[Token]:
        """Qualified name with optional generics, array dims, varargs dots."""
        tokens = [self.expect_identifier("type name")]
        while self.at("."):
            nxt = self.peek(1)
            if nxt is None or nxt.kind != TokenKind.IDENTIFIER:
                break  # varargs dots, handled below
            tokens.append(self.advance())
            tokens.append(self.advance())
        if self.at("<"):
            tokens.extend(self._collect_balanced("<", ">"))
        while self.at("[") and self.peek(1) is not None and self.peek(1).text == "]":
            tokens.append(self.advance())
            tokens.append(self.advance())
        while self.at("."):
            tokens.append(self.advance())
        return tokens

    def _collect_balanced(self, open_text: str, close_text: str) -> list[Token]:
        opener = self.expect(open_text)
        collected = [opener]
        depth = 1
        while depth > 0:
            tok = self.peek()
            if tok is None:
                raise ParseError(f"unbalanced '{open_text}'", opener.span)
            collected.append(self.advance())
            if tok.text == open_text:
                depth += 1
            elif tok.text == close_text:
                depth -= 1
        return collected

    # -- declarations ---------------------------------------------------

    def parse_unit(self, file_path: str) -> ElementTree:
        self.skip_annotations()
        if self.at("package"):
            self.advance()
            self.skip_qualified_name()
            self.expect(";")
        while self.at("import"):
            self.advance()
            if self.at("static"):
                self.advance()
            self.skip_qualified_name()
            self.expect(";")

        classes: list[ClassDecl] = []
        names: set[str] = set()
        while self.peek() is not None:
            if self.at(";"):
                self.advance()
                continue
            decl = self.parse_class()
            if decl.name in names:
                raise ParseError(f"duplicate class '{decl.name}'", decl.name_span)
            names.add(decl.name)
            classes.append(decl)
        return ElementTree(file_path=file_path, classes=tuple(classes))

    def parse_class(self) -> ClassDecl:
        start_tok = self.peek()
        if start_tok is None:
            raise ParseError("expected class declaration", self._eof_span())
        self.skip_annotations()
        modifiers, _, modifiers_span = self.parse_modifiers()
        tok = self.peek()
        if tok is not None and tok.text in ("interface", "enum", "record"):
            raise ParseError(f"unsupported declaration '{tok.text}'", tok.span)
        self.expect("class")
        name_tok = self.expect_identifier("class name")
        if self.at("<"):
            self.skip_balanced("<", ">")
        if self.at("extends"):
            self.advance()
            self.parse_type_tokens()
        if self.at("implements"):
            self.advance()
            self.parse_type_tokens()
            while self.at(","):
                self.advance()
                self.parse_type_tokens()
        self.expect("{")
        fields, methods, nested = self.parse_members(name_tok.text)
        close = self.expect("}")
        return ClassDecl(
            name=name_tok.text,
            name_span=name_tok.span,
            modifiers=modifiers,
            modifiers_span=modifiers_span,
            fields=tuple(fields),
            methods=tuple(methods),
            nested=tuple(nested),
            span=_join_span(start_tok.span, close.span),
        )

    def parse_members(
        self, class_name: str
    ) -> tuple[list[FieldDecl], list[MethodDecl], list[ClassDecl]]:
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        nested: list[ClassDecl] = []
        keys: set[tuple] = set()

        while not self.at("}"):
            tok = self.peek()
            if tok is None:
                raise ParseError("expected '}'", self._eof_span())
            if tok.text == ";":
                self.advance()
                continue

            start_tok = tok
            start_pos = self.pos
            self.skip_annotations()
            modifiers, access, modifiers_span = self.parse_modifiers()
            accessibility = access if access is not None else PACKAGE_PRIVATE
            non_access = frozenset(m for m in modifiers if m not in ACCESS_MODIFIERS)

            nxt = self.peek()
            if nxt is not None and nxt.text in ("interface", "enum", "record"):
                raise ParseError(f"unsupported declaration '{nxt.text}'", nxt.span)

            if self.at("class"):
                self.pos = start_pos  # reparse from the declaration start
                decl = self.parse_class()
                key = ("class", decl.name)
                if key in keys:
                    raise ParseError(f"duplicate class '{decl.name}'", decl.name_span)
                keys.add(key)
                nested.append(decl)
                continue

            if self.at("<"):
                self.skip_balanced("<", ">")  # method type parameters

            # Constructor: class-name identifier immediately followed by '('
            ahead = self.peek(1)
            if (
                self.at(class_name)
                and self.at_kind(TokenKind.IDENTIFIER)
                and ahead is not None
                and ahead.text == "("
            ):
                name_tok = self.advance()
                decl = self.parse_method_rest(
                    start_tok, name_tok, None, None, accessibility, non_access, modifiers_span
                )
                key = ("method", decl.name, decl.arity)
                if key in keys:
                    raise ParseError(
                        f"duplicate constructor '{decl.name}/{decl.arity}'", decl.name_span
                    )
                keys.add(key)
                methods.append(decl)
                continue

            type_tokens = self.parse_type_tokens()
            name_tok = self.expect_identifier("member name")

            if self.at("("):
                decl = self.parse_method_rest(
                    start_tok,
                    name_tok,
                    _type_text(type_tokens),
                    _join_span(type_tokens[0].span, type_tokens[-1].span),
                    accessibility,
                    non_access,
                    modifiers_span,
                )
                key = ("method", decl.name, decl.arity)
                if key in keys:
                    raise ParseError(
                        f"duplicate method '{decl.name}/{decl.arity}'", decl.name_span
                    )
                keys.add(key)
                methods.append(decl)
            else:
                decl = self.parse_field_rest(
                    start_tok, name_tok, type_tokens, accessibility, non_access, modifiers_span
                )
                key = ("field", decl.name)
                if key in keys:
                    raise ParseError(f"duplicate field '{decl.name}'", decl.name_span)
                keys.add(key)
                fields.append(decl)

        return fields, methods, nested

    def parse_field_rest(
        self,
        start_tok: Token,
        name_tok: Token,
        type_tokens: list[Token],
        accessibility: str,
        modifiers: frozenset[str],
        modifiers_span: Optional[Span],
    ) -> FieldDecl:
        initializer_text: Optional[str] = None
        initializer_span: Optional[Span] = None
        if self.at("="):
            self.advance()
            init_tokens: list[Token] = []
            depth = 0
            while True:
                tok = self.peek()
                if tok is None:
                    raise ParseError("expected ';'", self._eof_span())
                if depth == 0 and tok.text == ";":
                    break
                if tok.text in "([{":
                    depth += 1
                elif tok.text in ")]}":
                    depth -= 1
                init_tokens.append(self.advance())
            if not init_tokens:
                raise ParseError("expected initializer expression", self.peek().span)
            initializer_text = " ".join(t.text for t in init_tokens)
            initializer_span = _join_span(init_tokens[0].span, init_tokens[-1].span)
        semi = self.expect(";")
        return FieldDecl(
            name=name_tok.text,
            name_span=name_tok.span,
            accessibility=accessibility,
            modifiers=modifiers,
            type_text=_type_text(type_tokens),
            type_span=_join_span(type_tokens[0].span, type_tokens[-1].span),
            initializer_text=initializer_text,
            initializer_span=initializer_span,
            span=_join_span(start_tok.span, semi.span),
            modifiers_span=modifiers_span,
        )

    def parse_method_rest(
        self,
        start_tok: Token,
        name_tok: Token,
        return_type_text: Optional[str],
        return_type_span: Optional[Span],
        accessibility: str,
        modifiers: frozenset[str],
        modifiers_span: Optional[Span],
    ) -> MethodDecl:
        self.expect("(")
        params: list[ParamDecl] = []
        if not self.at(")"):
            while True:
                params.append(self.parse_param())
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect(")")
        if self.at("throws"):
            self.advance()
            self.parse_type_tokens()
            while self.at(","):
                self.advance()
                self.parse_type_tokens()

        if self.at(";"):
            end = self.advance()
            fingerprint = body_fingerprint([])
            body_span = None
        elif self.at("{"):
            body_tokens = self._collect_balanced("{", "}")
            fingerprint = body_fingerprint(body_tokens)
            body_span = _join_span(body_tokens[0].span, body_tokens[-1].span)
            end = body_tokens[-1]
        else:
            tok = self.peek()
            span = tok.span if tok is not None else self._eof_span()
            raise ParseError(
                f"expected method body or ';', found '{tok.text if tok else 'EOF'}'", span
            )

        return MethodDecl(
            name=name_tok.text,
            name_span=name_tok.span,
            accessibility=accessibility,
            modifiers=modifiers,
            return_type_text=return_type_text,
            return_type_span=return_type_span,
            params=tuple(params),
            body_fingerprint=fingerprint,
            body_span=body_span,
            span=_join_span(start_tok.span, end.span),
            modifiers_span=modifiers_span,
        )

    def parse_param(self) -> ParamDecl:
        self.skip_annotations()
        if self.at("final"):
            self.advance()
        type_tokens = self.parse_type_tokens()
        name_tok = self.expect_identifier("parameter name")
        return ParamDecl(
            type_text=_type_text(type_tokens),
            type_span=_join_span(type_tokens[0].span, type_tokens[-1].span),
            name=name_tok.text,
            name_span=name_tok.span,
        )


def parse_unit(source: str, file_path: str) -> ElementTree:
    """Parse one source file; raises ParseError or LexError on failure."""
    tokens = tokenize(source)
    return _Parser(tokens).parse_unit(file_path)


def is_error_free(source: str) -> bool:
    """The error-free gate: does the source parse cleanly."""
    try:
        parse_unit(source, "<check>")
        return True
    except (ParseError, LexError):
        return False

"""Hand-rolled tokenizer shared by the MiniSol and DBDL parsers."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Diagnostic, ParseError

TWO_CHAR_OPS = {"=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*="}
SINGLE_CHARS = set("{}()[];,.=<>+-*/%!:#")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, STRING, EOF, or the operator/punct text itself
    text: str
    line: int
    col: int
    value: int = 0  # numeric payload for NUMBER tokens
    is_hex: bool = False


def _syntax(message: str, line: int, col: int) -> ParseError:
    return ParseError([Diagnostic("syntax", message, line, col)])


def tokenize(source: str, comment: str) -> list[Token]:
    """Tokenize ``source``; ``comment`` is the to-end-of-line comment marker."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def advance(count: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch.isspace():
            advance()
            continue
        if source.startswith(comment, i):
            while i < n and source[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            advance(j - i)
            tokens.append(Token("IDENT", text, start_line, start_col))
            continue
        if ch.isdigit():
            j = i
            is_hex = source.startswith("0x", i) or source.startswith("0X", i)
            if is_hex:
                j = i + 2
                while j < n and source[j] in "0123456789abcdefABCDEF":
                    j += 1
                if j == i + 2:
                    raise _syntax("hex literal needs at least one digit", start_line, start_col)
            else:
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            advance(j - i)
            value = int(text, 16) if is_hex else int(text)
            tokens.append(Token("NUMBER", text, start_line, start_col, value=value, is_hex=is_hex))
            continue
        if ch == '"':
            j = i + 1
            chars: list[str] = []
            while j < n and source[j] != '"':
                if source[j] == "\\" and j + 1 < n:
                    esc = source[j + 1]
                    chars.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    j += 2
                else:
                    chars.append(source[j])
                    j += 1
            if j >= n:
                raise _syntax("unterminated string literal", start_line, start_col)
            advance(j + 1 - i)
            tokens.append(Token("STRING", "".join(chars), start_line, start_col))
            continue
        two = source[i : i + 2]
        if two in TWO_CHAR_OPS:
            advance(2)
            tokens.append(Token(two, two, start_line, start_col))
            continue
        if ch in SINGLE_CHARS:
            advance()
            tokens.append(Token(ch, ch, start_line, start_col))
            continue
        raise _syntax(f"unexpected character {ch!r}", start_line, start_col)

    tokens.append(Token("EOF", "", line, col))
    return tokens


class TokenStream:
    """Cursor over a token list with the usual peek/expect helpers."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self._tokens[min(self._pos + offset, len(self._tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self._pos += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def accept(self, kind: str) -> Token | None:
        if self.at(kind):
            return self.next()
        return None

    def expect(self, kind: str, expected: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            what = expected or f"'{kind}'"
            found = tok.text if tok.kind != "EOF" else "end of input"
            raise _syntax(f"expected {what}, found {found!r}", tok.line, tok.col)
        return self.next()

    def expect_ident(self, expected: str = "identifier") -> Token:
        return self.expect("IDENT", expected)

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return _syntax(message, tok.line, tok.col)

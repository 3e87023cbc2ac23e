"""Parser for DBDL test-suite files (`.dbdl`, `#` line comments)."""

from __future__ import annotations

from ..errors import Diagnostic, ParseError
from ..lexing import Token, TokenStream, tokenize
from .ast import (
    WEI_PER_ETHER,
    AccountDecl,
    ContractRef,
    Expectation,
    FrontendEvent,
    Literal,
    PreStateParam,
    RawAccessor,
    RawPath,
    TestCase,
    TestSuite,
)

_COMPARATORS = {"==", "!=", "<", "<=", ">", ">="}


def parse_dbdl(text: str) -> TestSuite:
    """Parse DBDL text into a TestSuite; raises ParseError with positions."""
    stream = TokenStream(tokenize(text, comment="#"))
    cases: list[TestCase] = []
    while not stream.at("EOF"):
        cases.append(_parse_testcase(stream))
    return TestSuite(tuple(cases))


def _is_kw(tok: Token, word: str) -> bool:
    return tok.kind == "IDENT" and tok.text == word


def _expect_kw(stream: TokenStream, word: str) -> Token:
    tok = stream.peek()
    if not _is_kw(tok, word):
        raise stream.error(f"expected '{word}', found {tok.text or 'end of input'!r}")
    return stream.next()


def _parse_testcase(stream: TokenStream) -> TestCase:
    _expect_kw(stream, "testcase")
    name = stream.expect("STRING", "test case name").text
    stream.expect("{")

    contract_refs: list[ContractRef] = []
    while _is_kw(stream.peek(), "contract"):
        tok = stream.next()
        alias = stream.expect_ident("contract alias").text
        _expect_kw(stream, "from")
        source = stream.expect("STRING", "source file").text
        contract_refs.append(ContractRef(alias, source, tok.line, tok.col))

    accounts: list[AccountDecl] = []
    while _is_kw(stream.peek(), "account"):
        tok = stream.next()
        alias = stream.expect_ident("account alias").text
        if any(a.alias == alias for a in accounts):
            raise ParseError([Diagnostic("duplicate-alias", f"duplicate account alias {alias!r}", tok.line, tok.col)])
        stream.expect("{")
        _expect_kw(stream, "balance")
        stream.expect(":")
        balance = _parse_amount(stream)
        stream.expect("}")
        accounts.append(AccountDecl(alias, balance, tok.line, tok.col))
    aliases = {a.alias for a in accounts}

    prestate: list[PreStateParam] = []
    if _is_kw(stream.peek(), "prestate"):
        stream.next()
        stream.expect("{")
        while not stream.at("}"):
            path = _parse_path(stream, aliases)
            stream.expect("=")
            value = _parse_literal(stream, aliases)
            prestate.append(PreStateParam(path, value))
        stream.expect("}")

    _expect_kw(stream, "events")
    stream.expect("{")
    events: list[FrontendEvent] = []
    while not stream.at("}"):
        tok = stream.peek()
        _expect_kw(stream, "call")
        contract = stream.expect_ident("contract alias").text
        stream.expect(".")
        function = stream.expect_ident("function name").text
        stream.expect("(")
        args: list[Literal] = []
        if not stream.at(")"):
            args.append(_parse_literal(stream, aliases))
            while stream.accept(","):
                args.append(_parse_literal(stream, aliases))
        stream.expect(")")
        _expect_kw(stream, "from")
        sender_tok = stream.expect_ident("sender alias")
        if sender_tok.text not in aliases:
            raise ParseError([Diagnostic("unknown-alias", f"unknown account alias {sender_tok.text!r}", sender_tok.line, sender_tok.col)])
        value = 0
        if _is_kw(stream.peek(), "value"):
            stream.next()
            value = _parse_amount(stream)
        events.append(FrontendEvent(contract, function, tuple(args), sender_tok.text, value, tok.line, tok.col))
    stream.expect("}")

    expectations: list[Expectation] = []
    if _is_kw(stream.peek(), "expect"):
        stream.next()
        stream.expect("{")
        while not stream.at("}"):
            path = _parse_path(stream, aliases)
            cmp_tok = stream.peek()
            if cmp_tok.kind not in _COMPARATORS:
                raise stream.error(f"expected comparator, found {cmp_tok.text or 'end of input'!r}")
            stream.next()
            expected = _parse_literal(stream, aliases)
            expectations.append(Expectation(path, cmp_tok.kind, expected))
        stream.expect("}")

    stream.expect("}")
    return TestCase(name, tuple(contract_refs), tuple(accounts), tuple(prestate), tuple(events), tuple(expectations))


def _parse_amount(stream: TokenStream) -> int:
    num = stream.expect("NUMBER", "amount")
    unit = stream.expect_ident("'ether' or 'wei'")
    if unit.text == "ether":
        return num.value * WEI_PER_ETHER
    if unit.text == "wei":
        return num.value
    raise ParseError([Diagnostic("syntax", f"unknown unit {unit.text!r}", unit.line, unit.col)])


def _parse_path(stream: TokenStream, aliases: set[str]) -> RawPath:
    contract_tok = stream.expect_ident("contract alias")
    stream.expect(".")
    root = stream.expect_ident("variable name").text
    accessors: list[RawAccessor] = []
    while stream.accept("["):
        tok = stream.peek()
        if tok.kind == "NUMBER":
            stream.next()
            accessors.append(RawAccessor(tok.value, is_hex=tok.is_hex))
        elif tok.kind == "IDENT":
            stream.next()
            if tok.text not in aliases:
                raise ParseError([Diagnostic("unknown-alias", f"unknown account alias {tok.text!r}", tok.line, tok.col)])
            accessors.append(RawAccessor(AccountDecl(tok.text, 0).address, alias=tok.text))
        else:
            raise stream.error("expected number or account alias in path accessor")
        stream.expect("]")
    return RawPath(contract_tok.text, root, tuple(accessors), contract_tok.line, contract_tok.col)


def _parse_literal(stream: TokenStream, aliases: set[str]) -> Literal:
    tok = stream.peek()
    if tok.kind == "NUMBER":
        stream.next()
        return Literal("hex" if tok.is_hex else "number", tok.value)
    if _is_kw(tok, "true"):
        stream.next()
        return Literal("bool", 1)
    if _is_kw(tok, "false"):
        stream.next()
        return Literal("bool", 0)
    if tok.kind == "IDENT":
        stream.next()
        if tok.text not in aliases:
            raise ParseError([Diagnostic("unknown-alias", f"unknown account alias {tok.text!r}", tok.line, tok.col)])
        return Literal("alias", AccountDecl(tok.text, 0).address, alias=tok.text)
    raise stream.error(f"expected literal, found {tok.text or 'end of input'!r}")

"""Recursive-descent parser for MiniSol source text."""

from __future__ import annotations

from ..errors import Diagnostic, ParseError
from ..lexing import Token, TokenStream, tokenize
from . import ast

KEYWORDS = {
    "contract", "function", "payable", "returns", "require", "if", "else",
    "for", "return", "pay", "true", "false", "msg", "mapping",
} | set(ast.ELEMENTARY_KINDS)

_ASSIGN_OPS = ("=", "+=", "-=", "*=")


def parse_source(text: str) -> ast.SourceUnit:
    """Parse MiniSol source into a SourceUnit.

    Raises ParseError with 1-based line/column diagnostics on malformed
    input or duplicate contract/variable/function names.
    """
    stream = TokenStream(tokenize(text, comment="//"))
    contracts: list[ast.ContractDecl] = []
    while not stream.at("EOF"):
        contracts.append(_parse_contract(stream))
    names: set[str] = set()
    for contract in contracts:
        if contract.name in names:
            raise ParseError([Diagnostic("duplicate-name", f"duplicate contract name {contract.name!r}")])
        names.add(contract.name)
    return ast.SourceUnit(contracts=tuple(contracts), text=text)


def extract_variables(contract: ast.ContractDecl) -> list[tuple[str, ast.TypeExpr, int]]:
    """State variables in declaration order, as presented for pre-state selection."""
    return [(v.name, v.ty, v.decl_index) for v in contract.state_vars]


def _is_kw(tok: Token, word: str) -> bool:
    return tok.kind == "IDENT" and tok.text == word


def _expect_kw(stream: TokenStream, word: str) -> Token:
    tok = stream.peek()
    if not _is_kw(tok, word):
        raise stream.error(f"expected '{word}', found {tok.text or 'end of input'!r}")
    return stream.next()


def _expect_name(stream: TokenStream, what: str) -> Token:
    tok = stream.expect_ident(what)
    if tok.text in KEYWORDS:
        raise ParseError([Diagnostic("syntax", f"keyword {tok.text!r} cannot be used as {what}", tok.line, tok.col)])
    return tok


def _parse_contract(stream: TokenStream) -> ast.ContractDecl:
    _expect_kw(stream, "contract")
    name_tok = _expect_name(stream, "contract name")
    stream.expect("{")
    state_vars: list[ast.StateVarDecl] = []
    functions: list[ast.FunctionDecl] = []
    member_names: set[str] = set()
    while not stream.at("}"):
        tok = stream.peek()
        if _is_kw(tok, "function"):
            fn = _parse_function(stream)
            if fn.name in member_names:
                raise ParseError([Diagnostic("duplicate-name", f"duplicate name {fn.name!r} in contract {name_tok.text!r}", tok.line, tok.col)])
            member_names.add(fn.name)
            functions.append(fn)
        else:
            ty = _parse_type(stream)
            var_tok = _expect_name(stream, "variable name")
            stream.expect(";")
            if var_tok.text in member_names:
                raise ParseError([Diagnostic("duplicate-name", f"duplicate name {var_tok.text!r} in contract {name_tok.text!r}", var_tok.line, var_tok.col)])
            member_names.add(var_tok.text)
            state_vars.append(ast.StateVarDecl(var_tok.text, ty, len(state_vars)))
    stream.expect("}")
    return ast.ContractDecl(name_tok.text, tuple(state_vars), tuple(functions))


def _parse_elementary(stream: TokenStream) -> ast.Elementary:
    tok = stream.peek()
    if tok.kind == "IDENT" and tok.text in ast.ELEMENTARY_KINDS:
        stream.next()
        return ast.Elementary(tok.text)
    raise stream.error(f"expected elementary type, found {tok.text or 'end of input'!r}")


def _parse_type(stream: TokenStream) -> ast.TypeExpr:
    tok = stream.peek()
    ty: ast.TypeExpr
    if _is_kw(tok, "mapping"):
        stream.next()
        stream.expect("(")
        key = _parse_elementary(stream)
        stream.expect("=>")
        value = _parse_type(stream)
        stream.expect(")")
        ty = ast.Mapping(key, value)
    else:
        ty = _parse_elementary(stream)
    while stream.at("["):
        stream.next()
        if stream.accept("]"):
            ty = ast.DynArray(ty)
            continue
        num = stream.expect("NUMBER", "array length")
        if num.value <= 0:
            raise ParseError([Diagnostic("syntax", "fixed array length must be positive", num.line, num.col)])
        stream.expect("]")
        ty = ast.FixedArray(ty, num.value)
    return ty


def _parse_function(stream: TokenStream) -> ast.FunctionDecl:
    _expect_kw(stream, "function")
    name_tok = _expect_name(stream, "function name")
    stream.expect("(")
    params: list[ast.Param] = []
    if not stream.at(")"):
        while True:
            ty = _parse_elementary(stream)
            p_tok = _expect_name(stream, "parameter name")
            if any(p.name == p_tok.text for p in params):
                raise ParseError([Diagnostic("duplicate-name", f"duplicate parameter {p_tok.text!r}", p_tok.line, p_tok.col)])
            params.append(ast.Param(p_tok.text, ty))
            if not stream.accept(","):
                break
    stream.expect(")")
    payable = False
    if _is_kw(stream.peek(), "payable"):
        stream.next()
        payable = True
    returns = None
    if _is_kw(stream.peek(), "returns"):
        stream.next()
        stream.expect("(")
        returns = _parse_elementary(stream)
        stream.expect(")")
    body = _parse_block(stream)
    return ast.FunctionDecl(name_tok.text, tuple(params), payable, returns, body)


def _parse_block(stream: TokenStream) -> tuple[ast.Stmt, ...]:
    stream.expect("{")
    stmts: list[ast.Stmt] = []
    while not stream.at("}"):
        stmts.append(_parse_stmt(stream))
    stream.expect("}")
    return tuple(stmts)


def _parse_stmt(stream: TokenStream) -> ast.Stmt:
    tok = stream.peek()
    if _is_kw(tok, "require"):
        stream.next()
        stream.expect("(")
        cond = _parse_expr(stream)
        message = None
        if stream.accept(","):
            message = stream.expect("STRING", "string message").text
        stream.expect(")")
        stream.expect(";")
        return ast.Require(cond, message)
    if _is_kw(tok, "if"):
        stream.next()
        stream.expect("(")
        cond = _parse_expr(stream)
        stream.expect(")")
        then = _parse_block(stream)
        orelse = None
        if _is_kw(stream.peek(), "else"):
            stream.next()
            orelse = _parse_block(stream)
        return ast.If(cond, then, orelse)
    if _is_kw(tok, "for"):
        stream.next()
        stream.expect("(")
        var_tok = _expect_name(stream, "loop variable")
        stream.expect("=")
        init = _parse_expr(stream)
        stream.expect(";")
        cond = _parse_expr(stream)
        stream.expect(";")
        step_tok = _expect_name(stream, "loop variable")
        stream.expect("+=")
        step = _parse_expr(stream)
        stream.expect(")")
        body = _parse_block(stream)
        return ast.For(var_tok.text, init, cond, step_tok.text, step, body)
    if _is_kw(tok, "return"):
        stream.next()
        if stream.accept(";"):
            return ast.Return(None)
        value = _parse_expr(stream)
        stream.expect(";")
        return ast.Return(value)
    if _is_kw(tok, "pay"):
        stream.next()
        stream.expect("(")
        to = _parse_expr(stream)
        stream.expect(",")
        amount = _parse_expr(stream)
        stream.expect(")")
        stream.expect(";")
        return ast.Pay(to, amount)
    if tok.kind == "IDENT" and tok.text in ast.ELEMENTARY_KINDS:
        ty = _parse_elementary(stream)
        name_tok = _expect_name(stream, "local variable name")
        stream.expect("=")
        value = _parse_expr(stream)
        stream.expect(";")
        return ast.LocalDecl(name_tok.text, ty, value)
    lvalue = _parse_lvalue(stream)
    if stream.at("."):
        stream.next()
        _expect_kw(stream, "push")
        stream.expect("(")
        value = _parse_expr(stream)
        stream.expect(")")
        stream.expect(";")
        return ast.Push(lvalue, value)
    op_tok = stream.peek()
    if op_tok.kind not in _ASSIGN_OPS:
        raise stream.error(f"expected assignment operator, found {op_tok.text or 'end of input'!r}")
    stream.next()
    value = _parse_expr(stream)
    stream.expect(";")
    return ast.Assign(lvalue, op_tok.kind, value)


def _parse_lvalue(stream: TokenStream) -> ast.Lvalue:
    name_tok = _expect_name(stream, "variable name")
    indexes: list[ast.Expr] = []
    while stream.at("["):
        stream.next()
        indexes.append(_parse_expr(stream))
        stream.expect("]")
    return ast.Lvalue(name_tok.text, tuple(indexes))


# Expression parsing with C-style precedence, lowest first.
_BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


def _parse_expr(stream: TokenStream, level: int = 0) -> ast.Expr:
    if level == len(_BINARY_LEVELS):
        return _parse_unary(stream)
    expr = _parse_expr(stream, level + 1)
    while stream.peek().kind in _BINARY_LEVELS[level]:
        op = stream.next().kind
        right = _parse_expr(stream, level + 1)
        expr = ast.Binary(op, expr, right)
    return expr


def _parse_unary(stream: TokenStream) -> ast.Expr:
    if stream.at("!"):
        stream.next()
        return ast.Unary("!", _parse_unary(stream))
    return _parse_primary(stream)


def _parse_primary(stream: TokenStream) -> ast.Expr:
    tok = stream.peek()
    if tok.kind == "NUMBER":
        stream.next()
        return ast.Number(tok.value)
    if stream.at("("):
        stream.next()
        expr = _parse_expr(stream)
        stream.expect(")")
        return expr
    if _is_kw(tok, "true"):
        stream.next()
        return ast.BoolLit(True)
    if _is_kw(tok, "false"):
        stream.next()
        return ast.BoolLit(False)
    if _is_kw(tok, "msg"):
        stream.next()
        stream.expect(".")
        field = stream.expect_ident("'sender' or 'value'")
        if field.text == "sender":
            return ast.MsgSender()
        if field.text == "value":
            return ast.MsgValue()
        raise ParseError([Diagnostic("syntax", f"unknown msg field {field.text!r}", field.line, field.col)])
    if tok.kind == "IDENT":
        lvalue = _parse_lvalue(stream)
        if stream.at(".") and _is_kw(stream.peek(1), "length"):
            stream.next()
            stream.next()
            return ast.Length(lvalue)
        return lvalue
    raise stream.error(f"expected expression, found {tok.text or 'end of input'!r}")

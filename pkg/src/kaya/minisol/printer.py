"""Canonical MiniSol pretty-printer.

parse_source(format_source(unit)) is structurally equal to unit for any
valid tree; tests enforce this round-trip on generated corpora.
"""

from __future__ import annotations

from . import ast

_PREC = {
    "||": 1, "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7


def format_source(unit: ast.SourceUnit) -> str:
    return "\n".join(_format_contract(c) for c in unit.contracts)


def _format_contract(contract: ast.ContractDecl) -> str:
    lines = [f"contract {contract.name} {{"]
    for var in contract.state_vars:
        lines.append(f"    {var.ty} {var.name};")
    for fn in contract.functions:
        if contract.state_vars or fn is not contract.functions[0]:
            lines.append("")
        lines.extend(_format_function(fn))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _format_function(fn: ast.FunctionDecl) -> list[str]:
    params = ", ".join(f"{p.ty} {p.name}" for p in fn.params)
    head = f"    function {fn.name}({params})"
    if fn.payable:
        head += " payable"
    if fn.returns is not None:
        head += f" returns ({fn.returns})"
    lines = [head + " {"]
    for stmt in fn.body:
        lines.extend(_format_stmt(stmt, 2))
    lines.append("    }")
    return lines


def _format_stmt(stmt: ast.Stmt, depth: int) -> list[str]:
    pad = "    " * depth
    if isinstance(stmt, ast.Assign):
        return [f"{pad}{_expr(stmt.target)} {stmt.op} {_expr(stmt.value)};"]
    if isinstance(stmt, ast.Require):
        if stmt.message is None:
            return [f"{pad}require({_expr(stmt.cond)});"]
        return [f"{pad}require({_expr(stmt.cond)}, {_quote(stmt.message)});"]
    if isinstance(stmt, ast.If):
        lines = [f"{pad}if ({_expr(stmt.cond)}) {{"]
        for inner in stmt.then:
            lines.extend(_format_stmt(inner, depth + 1))
        if stmt.orelse is None:
            lines.append(f"{pad}}}")
        else:
            lines.append(f"{pad}}} else {{")
            for inner in stmt.orelse:
                lines.extend(_format_stmt(inner, depth + 1))
            lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, ast.For):
        head = (
            f"{pad}for ({stmt.var} = {_expr(stmt.init)}; {_expr(stmt.cond)}; "
            f"{stmt.step_var} += {_expr(stmt.step)}) {{"
        )
        lines = [head]
        for inner in stmt.body:
            lines.extend(_format_stmt(inner, depth + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, ast.Return):
        if stmt.value is None:
            return [f"{pad}return;"]
        return [f"{pad}return {_expr(stmt.value)};"]
    if isinstance(stmt, ast.Pay):
        return [f"{pad}pay({_expr(stmt.to)}, {_expr(stmt.amount)});"]
    if isinstance(stmt, ast.LocalDecl):
        return [f"{pad}{stmt.ty} {stmt.name} = {_expr(stmt.value)};"]
    if isinstance(stmt, ast.Push):
        return [f"{pad}{_expr(stmt.target)}.push({_expr(stmt.value)});"]
    raise TypeError(f"unknown statement node {stmt!r}")


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _expr(expr: ast.Expr, min_prec: int = 0) -> str:
    if isinstance(expr, ast.Number):
        return str(expr.value)
    if isinstance(expr, ast.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, ast.MsgSender):
        return "msg.sender"
    if isinstance(expr, ast.MsgValue):
        return "msg.value"
    if isinstance(expr, ast.Lvalue):
        return expr.name + "".join(f"[{_expr(i)}]" for i in expr.indexes)
    if isinstance(expr, ast.Length):
        return f"{_expr(expr.target)}.length"
    if isinstance(expr, ast.Unary):
        text = f"!{_expr(expr.operand, _UNARY_PREC)}"
        return text
    if isinstance(expr, ast.Binary):
        prec = _PREC[expr.op]
        text = f"{_expr(expr.left, prec)} {expr.op} {_expr(expr.right, prec + 1)}"
        if prec < min_prec:
            return f"({text})"
        return text
    raise TypeError(f"unknown expression node {expr!r}")

"""MiniSol contract analysis: parsing, variable extraction, canonical formatting."""

from .ast import (
    Assign,
    Binary,
    BoolLit,
    ContractDecl,
    DynArray,
    Elementary,
    Expr,
    FixedArray,
    For,
    FunctionDecl,
    If,
    Length,
    LocalDecl,
    Lvalue,
    Mapping,
    MsgSender,
    MsgValue,
    Number,
    Param,
    Pay,
    Push,
    Require,
    Return,
    SourceUnit,
    StateVarDecl,
    Stmt,
    TypeExpr,
    Unary,
)
from .parser import extract_variables, parse_source
from .printer import format_source

__all__ = [
    "Assign", "Binary", "BoolLit", "ContractDecl", "DynArray", "Elementary",
    "Expr", "FixedArray", "For", "FunctionDecl", "If", "Length", "LocalDecl",
    "Lvalue", "Mapping", "MsgSender", "MsgValue", "Number", "Param", "Pay",
    "Push", "Require", "Return", "SourceUnit", "StateVarDecl", "Stmt",
    "TypeExpr", "Unary",
    "extract_variables", "parse_source", "format_source",
]

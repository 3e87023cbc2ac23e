"""AST node definitions for MiniSol contracts.

All nodes are frozen dataclasses so parsed trees are hashable, structurally
comparable (the printer round-trip law relies on this), and safe to share
between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

UINT_KINDS = tuple(f"uint{w}" for w in range(8, 257, 8))
ELEMENTARY_KINDS = UINT_KINDS + ("int256", "bool", "address")

_WIDTHS = {f"uint{w}": w // 8 for w in range(8, 257, 8)}
_WIDTHS.update({"int256": 32, "bool": 1, "address": 20})


@dataclass(frozen=True)
class Elementary:
    kind: str

    @property
    def width(self) -> int:
        """Byte width in storage (1-32)."""
        return _WIDTHS[self.kind]

    @property
    def is_numeric(self) -> bool:
        return self.kind.startswith("uint") or self.kind == "int256"

    @property
    def signed(self) -> bool:
        return self.kind == "int256"

    def __str__(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Mapping:
    key: Elementary
    value: "TypeExpr"

    def __str__(self) -> str:
        return f"mapping({self.key} => {self.value})"


@dataclass(frozen=True)
class DynArray:
    elem: "TypeExpr"

    def __str__(self) -> str:
        return f"{self.elem}[]"


@dataclass(frozen=True)
class FixedArray:
    elem: "TypeExpr"
    length: int

    def __str__(self) -> str:
        return f"{self.elem}[{self.length}]"


TypeExpr = Union[Elementary, Mapping, DynArray, FixedArray]


# --- expressions -----------------------------------------------------------


@dataclass(frozen=True)
class Number:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class MsgSender:
    pass


@dataclass(frozen=True)
class MsgValue:
    pass


@dataclass(frozen=True)
class Lvalue:
    """A named location with optional index accessors; doubles as a load expression."""

    name: str
    indexes: tuple["Expr", ...] = ()


@dataclass(frozen=True)
class Length:
    target: Lvalue


@dataclass(frozen=True)
class Unary:
    op: str  # "!"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Number, BoolLit, MsgSender, MsgValue, Lvalue, Length, Unary, Binary]


# --- statements ------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    target: Lvalue
    op: str  # "=", "+=", "-=", "*="
    value: Expr


@dataclass(frozen=True)
class Require:
    cond: Expr
    message: str | None = None


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple["Stmt", ...]
    orelse: tuple["Stmt", ...] | None = None


@dataclass(frozen=True)
class For:
    var: str
    init: Expr
    cond: Expr
    step_var: str
    step: Expr
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class Return:
    value: Expr | None = None


@dataclass(frozen=True)
class Pay:
    to: Expr
    amount: Expr


@dataclass(frozen=True)
class LocalDecl:
    name: str
    ty: Elementary
    value: Expr


@dataclass(frozen=True)
class Push:
    target: Lvalue
    value: Expr


Stmt = Union[Assign, Require, If, For, Return, Pay, LocalDecl, Push]


# --- declarations ----------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    ty: Elementary


@dataclass(frozen=True)
class StateVarDecl:
    name: str
    ty: TypeExpr
    decl_index: int


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: tuple[Param, ...]
    payable: bool
    returns: Elementary | None
    body: tuple[Stmt, ...]


@dataclass(frozen=True)
class ContractDecl:
    name: str
    state_vars: tuple[StateVarDecl, ...]
    functions: tuple[FunctionDecl, ...]

    def state_var(self, name: str) -> StateVarDecl | None:
        for var in self.state_vars:
            if var.name == name:
                return var
        return None

    def function(self, name: str) -> FunctionDecl | None:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None


@dataclass(frozen=True)
class SourceUnit:
    contracts: tuple[ContractDecl, ...]
    text: str = field(default="", compare=False)

    def contract(self, name: str) -> ContractDecl | None:
        for contract in self.contracts:
            if contract.name == name:
                return contract
        return None

"""AST for DBDL test suites.

Nodes are frozen dataclasses; source positions are excluded from equality so
the printer round-trip law can compare trees structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..keccak import keccak256

WEI_PER_ETHER = 10**18

_ADDRESS_MASK = (1 << 160) - 1


def account_address(alias: str) -> int:
    """Deterministic 160-bit address for an account or contract alias."""
    return int.from_bytes(keccak256(b"kaya:" + alias.encode("utf-8")), "big") & _ADDRESS_MASK


@dataclass(frozen=True)
class Literal:
    """A DBDL literal: number, bool, hex word, or account alias (pre-resolved)."""

    kind: str  # "number" | "bool" | "hex" | "alias"
    value: int
    alias: str | None = None

    def render(self) -> str:
        if self.kind == "alias":
            return self.alias or ""
        if self.kind == "bool":
            return "true" if self.value else "false"
        if self.kind == "hex":
            return hex(self.value)
        return str(self.value)


@dataclass(frozen=True)
class RawAccessor:
    """Bracketed path accessor; mapping-vs-array typing happens in validation."""

    word: int
    alias: str | None = None
    is_hex: bool = False

    def render(self) -> str:
        if self.alias is not None:
            return self.alias
        if self.is_hex:
            return hex(self.word)
        return str(self.word)


@dataclass(frozen=True)
class RawPath:
    contract: str
    root: str
    accessors: tuple[RawAccessor, ...] = ()
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def text(self) -> str:
        return f"{self.contract}.{self.root}" + "".join(f"[{a.render()}]" for a in self.accessors)


@dataclass(frozen=True)
class ContractRef:
    alias: str
    source: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AccountDecl:
    alias: str
    balance: int  # wei
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def address(self) -> int:
        return account_address(self.alias)


@dataclass(frozen=True)
class PreStateParam:
    path: RawPath
    value: Literal


@dataclass(frozen=True)
class FrontendEvent:
    contract: str
    function: str
    args: tuple[Literal, ...]
    sender: str
    value: int = 0  # wei
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


COMPARATORS = ("==", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Expectation:
    path: RawPath
    comparator: str
    expected: Literal

    @property
    def text(self) -> str:
        return f"{self.path.text} {self.comparator} {self.expected.render()}"


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    name: str
    contract_refs: tuple[ContractRef, ...]
    accounts: tuple[AccountDecl, ...]
    prestate: tuple[PreStateParam, ...]
    events: tuple[FrontendEvent, ...]
    expectations: tuple[Expectation, ...]

    def account(self, alias: str) -> AccountDecl | None:
        for acct in self.accounts:
            if acct.alias == alias:
                return acct
        return None


@dataclass(frozen=True)
class TestSuite:
    __test__ = False  # not a pytest class

    cases: tuple[TestCase, ...]

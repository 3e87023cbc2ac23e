"""Suite validation against parsed contracts.

validate() is sound for the runner: a suite with no diagnostics executes
without name/arity/type errors (runtime reverts are still possible and fine).
"""

from __future__ import annotations

from ..errors import Diagnostic, KayaError
from ..layout import Index, Key, VariablePath
from ..minisol.ast import ContractDecl, DynArray, Elementary, FixedArray, Mapping, TypeExpr
from .ast import Expectation, FrontendEvent, Literal, RawAccessor, RawPath, TestCase, TestSuite


class PathError(KayaError):
    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


def type_path(path: RawPath, contract: ContractDecl) -> tuple[VariablePath, TypeExpr]:
    """Type-check a raw path and produce the typed VariablePath plus terminal type."""
    var = contract.state_var(path.root)
    if var is None:
        raise PathError(f"{path.text}: no state variable {path.root!r} in contract {contract.name}")
    ty: TypeExpr = var.ty
    accessors: list[Key | Index] = []
    for acc in path.accessors:
        if isinstance(ty, Elementary):
            raise PathError(f"{path.text}: too many accessors, {ty} is not indexable")
        if isinstance(ty, Mapping):
            problem = _key_problem(acc, ty.key)
            if problem:
                raise PathError(f"{path.text}: {problem}")
            accessors.append(Key(acc.word))
            ty = ty.value
        else:
            if acc.alias is not None:
                raise PathError(f"{path.text}: array index cannot be an account alias")
            if isinstance(ty, FixedArray):
                if acc.word >= ty.length:
                    raise PathError(f"{path.text}: index {acc.word} out of range for {ty}")
                ty = ty.elem
            elif isinstance(ty, DynArray):
                ty = ty.elem
            accessors.append(Index(acc.word))
    return VariablePath(path.contract, path.root, tuple(accessors)), ty


def type_value_path(path: RawPath, contract: ContractDecl) -> tuple[VariablePath, Elementary]:
    typed, ty = type_path(path, contract)
    if not isinstance(ty, Elementary):
        raise PathError(f"{path.text}: does not reach a value-type location ({ty})")
    return typed, ty


def _key_problem(acc: RawAccessor, key_ty: Elementary) -> str | None:
    if key_ty.kind == "address":
        if acc.alias is not None or acc.word < (1 << 160):
            return None
        return "address key out of range"
    if acc.alias is not None:
        return f"alias key not allowed for mapping({key_ty} => ...)"
    if key_ty.kind == "bool":
        return None if acc.word <= 1 else "bool key must be 0 or 1"
    if not key_ty.signed and acc.word >= (1 << (8 * key_ty.width)):
        return f"key does not fit {key_ty}"
    return None


def _literal_problem(lit: Literal, ty: Elementary) -> str | None:
    if ty.kind == "address":
        if lit.kind == "bool":
            return "boolean literal where an address is expected"
        if lit.value >= (1 << 160):
            return "address literal out of range"
        return None
    if lit.kind == "alias":
        return f"account alias where a {ty} is expected"
    if ty.kind == "bool":
        return None if lit.value <= 1 else "bool value must be 0 or 1"
    if ty.kind == "int256":
        return None  # any 256-bit word is a valid two's-complement int256
    if lit.kind == "bool":
        return f"boolean literal where a {ty} is expected"
    if lit.value >= (1 << (8 * ty.width)):
        return f"value does not fit {ty}"
    return None


def validate(suite: TestSuite, contracts: list[ContractDecl]) -> list[Diagnostic]:
    """All problems that would make the runner refuse or crash; empty means runnable."""
    diags: list[Diagnostic] = []
    by_name = {c.name: c for c in contracts}
    seen_cases: set[str] = set()
    for case in suite.cases:
        if case.name in seen_cases:
            diags.append(Diagnostic("duplicate-name", f"duplicate test case name {case.name!r}"))
        seen_cases.add(case.name)
        diags.extend(_validate_case(case, by_name))
    return diags


def _validate_case(case: TestCase, by_name: dict[str, ContractDecl]) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    refs: dict[str, ContractDecl] = {}
    for ref in case.contract_refs:
        if ref.alias in refs:
            diags.append(Diagnostic("duplicate-alias", f"duplicate contract alias {ref.alias!r}", ref.line, ref.col))
            continue
        contract = by_name.get(ref.alias)
        if contract is None:
            diags.append(Diagnostic("unknown-contract", f"no contract named {ref.alias!r} among provided sources", ref.line, ref.col))
        else:
            refs[ref.alias] = contract

    aliases: set[str] = set()
    for acct in case.accounts:
        if acct.alias in aliases:
            diags.append(Diagnostic("duplicate-alias", f"duplicate account alias {acct.alias!r}", acct.line, acct.col))
        if acct.alias in refs:
            diags.append(Diagnostic("duplicate-alias", f"account alias {acct.alias!r} collides with a contract alias", acct.line, acct.col))
        aliases.add(acct.alias)

    if not case.events:
        diags.append(Diagnostic("empty-events", f"test case {case.name!r} has no events"))

    def check_path(path: RawPath, value: Literal | None, what: str) -> None:
        contract = refs.get(path.contract)
        if contract is None:
            diags.append(Diagnostic("unknown-contract", f"{what} references undeclared contract {path.contract!r}", path.line, path.col))
            return
        try:
            _, ty = type_value_path(path, contract)
        except PathError as err:
            diags.append(Diagnostic("type-mismatch", f"{what}: {err.message}", path.line, path.col))
            return
        if value is not None:
            problem = _literal_problem(value, ty)
            if problem:
                diags.append(Diagnostic("value-overflow", f"{what} {path.text}: {problem}", path.line, path.col))

    for param in case.prestate:
        check_path(param.path, param.value, "pre-state parameter")

    for event in case.events:
        diags.extend(_validate_event(event, case, refs, aliases))

    for exp in case.expectations:
        check_path(exp.path, exp.expected, "expectation")
        if exp.comparator not in ("==", "!=", "<", "<=", ">", ">="):
            diags.append(Diagnostic("syntax", f"unknown comparator {exp.comparator!r}", exp.path.line, exp.path.col))
    return diags


def _validate_event(
    event: FrontendEvent, case: TestCase, refs: dict[str, ContractDecl], aliases: set[str]
) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    if event.sender not in aliases:
        diags.append(Diagnostic("unknown-alias", f"unknown sender alias {event.sender!r}", event.line, event.col))
    contract = refs.get(event.contract)
    if contract is None:
        diags.append(Diagnostic("unknown-contract", f"event references undeclared contract {event.contract!r}", event.line, event.col))
        return diags
    fn = contract.function(event.function)
    if fn is None:
        diags.append(Diagnostic("unknown-function", f"contract {contract.name} has no function {event.function!r}", event.line, event.col))
        return diags
    if len(event.args) != len(fn.params):
        diags.append(Diagnostic(
            "arity-mismatch",
            f"{contract.name}.{fn.name} takes {len(fn.params)} argument(s), event supplies {len(event.args)}",
            event.line, event.col,
        ))
        return diags
    for arg, param in zip(event.args, fn.params):
        problem = _literal_problem(arg, param.ty)
        if problem:
            diags.append(Diagnostic(
                "type-mismatch",
                f"argument {param.name!r} of {contract.name}.{fn.name}: {problem}",
                event.line, event.col,
            ))
    if event.value > 0 and not fn.payable:
        diags.append(Diagnostic(
            "non-payable-value",
            f"{contract.name}.{fn.name} is not payable but event attaches value",
            event.line, event.col,
        ))
    return diags

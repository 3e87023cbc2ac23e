"""Reference SCVM: world-state model plus a MiniSol interpreter.

Semantics: checked 256-bit arithmetic (overflow, underflow, division by zero
revert), int256 in two's complement, value transfer at call entry, pay() moves
wei out of the contract account, every storage write emits a TraceRecord, and
reverted calls roll back storage and balances bit-exactly and discard their
traces. Any backend honoring the ScvmBackend protocol can replace MiniVM.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Protocol, Union

from .dbdl.ast import account_address
from .errors import ArityMismatchError, KayaError, UnknownTokenError, ValueOverflowError
from .layout import (
    AddressRegistry,
    Index,
    Key,
    SlotAddress,
    StorageLayout,
    VariablePath,
    compute_layout,
    extract_range,
    resolve_address,
    splice_range,
)
from .minisol import ast

DEFAULT_STEP_LIMIT = 1_000_000

UINT_MAX = (1 << 256) - 1
INT_MIN = -(1 << 255)
INT_MAX = (1 << 255) - 1


@dataclass
class WorldState:
    """Account balances plus per-contract slot-keyed storage; absent slots read zero."""

    accounts: dict[int, int] = field(default_factory=dict)
    contract_storage: dict[str, dict[int, int]] = field(default_factory=dict)

    def storage(self, alias: str) -> dict[int, int]:
        return self.contract_storage.setdefault(alias, {})

    def balance(self, address: int) -> int:
        return self.accounts.get(address, 0)

    def total_wei(self) -> int:
        return sum(self.accounts.values())

    def clone(self) -> "WorldState":
        return WorldState(
            accounts=dict(self.accounts),
            contract_storage={alias: dict(slots) for alias, slots in self.contract_storage.items()},
        )

    def restore(self, other: "WorldState") -> None:
        self.accounts = dict(other.accounts)
        self.contract_storage = {alias: dict(slots) for alias, slots in other.contract_storage.items()}


@dataclass(frozen=True)
class CallContext:
    sender: int
    value: int
    args: tuple[int, ...] = ()


@dataclass(frozen=True)
class TraceRecord:
    event_index: int
    step_index: int
    contract: str
    slot: int
    byte_range: tuple[int, int]
    old_word: int
    new_word: int

    def to_json(self) -> dict:
        return {
            "event": self.event_index,
            "step": self.step_index,
            "contract": self.contract,
            "slot": hex(self.slot),
            "offset": self.byte_range[0],
            "width": self.byte_range[1],
            "old": hex(self.old_word),
            "new": hex(self.new_word),
        }


@dataclass(frozen=True)
class Success:
    ret: int | None = None

    def to_json(self) -> dict:
        doc = {"status": "success"}
        if self.ret is not None:
            doc["return"] = hex(self.ret)
        return doc


@dataclass(frozen=True)
class Revert:
    reason: str

    def to_json(self) -> dict:
        return {"status": "revert", "reason": self.reason}


@dataclass(frozen=True)
class StepLimitExceeded:
    def to_json(self) -> dict:
        return {"status": "step_limit"}


Status = Union[Success, Revert, StepLimitExceeded]


@dataclass
class ExecutionOutcome:
    status: Status
    traces: list[TraceRecord]
    balance_deltas: dict[int, int]

    @property
    def ok(self) -> bool:
        return isinstance(self.status, Success)


class ScvmBackend(Protocol):
    """Contract every pluggable smart-contract VM must satisfy."""

    def deploy_prestate(self, balances: dict[int, int], params: list[tuple[str, VariablePath, int]]) -> WorldState:
        """Fresh world state with balances set and every param written to storage."""

    def execute_call(
        self, state: WorldState, contract: str, fn: str, ctx: CallContext, step_limit: int
    ) -> ExecutionOutcome:
        """Run one call; mutates state on success, rolls back on revert/step-limit."""

    def snapshot(self, state: WorldState) -> int:
        """Opaque token for the current state."""

    def rollback(self, state: WorldState, token: int) -> None:
        """Restore state bit-exactly to the snapshot point; idempotent."""


class _RevertSignal(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _StepLimitSignal(Exception):
    pass


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


class ContractNotFound(KayaError):
    pass


class FunctionNotFound(KayaError):
    pass


class MiniVM:
    """Reference ScvmBackend executing MiniSol ASTs directly."""

    def __init__(self, contracts: dict[str, ast.ContractDecl]):
        self.contracts = dict(contracts)
        self.layouts: dict[str, StorageLayout] = {a: compute_layout(c) for a, c in contracts.items()}
        self.registries: dict[str, AddressRegistry] = {a: AddressRegistry() for a in contracts}
        self._snapshots: dict[int, WorldState] = {}
        self._snapshot_ids = itertools.count(1)

    def contract_address(self, alias: str) -> int:
        return account_address(alias)

    # -- prestate ---------------------------------------------------------

    def deploy_prestate(self, balances: dict[int, int], params: list[tuple[str, VariablePath, int]]) -> WorldState:
        state = WorldState(accounts=dict(balances))
        for alias in self.contracts:
            state.accounts.setdefault(self.contract_address(alias), 0)
            state.storage(alias)
        for alias, path, value in params:
            addr = self._resolve(alias, path)
            if value >= (1 << (8 * addr.width)):
                raise ValueOverflowError(path.text, f"value {value} exceeds {addr.width}-byte location")
            slots = state.storage(alias)
            word = slots.get(addr.slot, 0)
            slots[addr.slot] = splice_range(word, addr.offset, addr.width, value)
        return state

    # -- snapshots --------------------------------------------------------

    def snapshot(self, state: WorldState) -> int:
        token = next(self._snapshot_ids)
        self._snapshots[token] = state.clone()
        return token

    def rollback(self, state: WorldState, token: int) -> None:
        saved = self._snapshots.get(token)
        if saved is None:
            raise UnknownTokenError(f"unknown snapshot token {token}")
        state.restore(saved)

    # -- execution --------------------------------------------------------

    def execute_call(
        self,
        state: WorldState,
        contract: str,
        fn: str,
        ctx: CallContext,
        step_limit: int = DEFAULT_STEP_LIMIT,
    ) -> ExecutionOutcome:
        decl = self.contracts.get(contract)
        if decl is None:
            raise ContractNotFound(f"no contract {contract!r} deployed")
        fn_decl = decl.function(fn)
        if fn_decl is None:
            raise FunctionNotFound(f"contract {contract} has no function {fn!r}")
        if len(ctx.args) != len(fn_decl.params):
            raise ArityMismatchError(
                f"{contract}.{fn} takes {len(fn_decl.params)} argument(s), got {len(ctx.args)}"
            )

        entry = state.clone()
        interp = _Interp(self, state, contract, ctx, step_limit)
        try:
            if ctx.value > 0:
                if not fn_decl.payable:
                    raise _RevertSignal(f"{fn} is not payable")
                if state.balance(ctx.sender) < ctx.value:
                    raise _RevertSignal("insufficient balance for attached value")
                state.accounts[ctx.sender] = state.balance(ctx.sender) - ctx.value
                me = self.contract_address(contract)
                state.accounts[me] = state.balance(me) + ctx.value
            interp.bind_params(fn_decl)
            ret: int | None = None
            try:
                interp.run_block(fn_decl.body)
            except _ReturnSignal as sig:
                ret = interp.encode_return(fn_decl, sig.value)
            status: Status = Success(ret)
        except _RevertSignal as sig:
            state.restore(entry)
            return ExecutionOutcome(Revert(sig.reason), [], {})
        except _StepLimitSignal:
            state.restore(entry)
            return ExecutionOutcome(StepLimitExceeded(), [], {})

        deltas = {
            addr: state.balance(addr) - entry.balance(addr)
            for addr in set(entry.accounts) | set(state.accounts)
            if state.balance(addr) != entry.balance(addr)
        }
        return ExecutionOutcome(status, interp.traces, deltas)

    def _resolve(self, alias: str, path: VariablePath) -> SlotAddress:
        return resolve_address(self.layouts[alias], path, self.registries[alias])


# --- interpreter internals ---------------------------------------------------

_Value = tuple  # (kind, value): kind in {"uint", "int", "bool", "address"}


def _decode_stored(word: int, elem: ast.Elementary) -> _Value:
    if elem.kind == "bool":
        if word > 1:
            raise _RevertSignal(f"type confusion: bool location holds {word}")
        return ("bool", word)
    if elem.kind == "address":
        return ("address", word)
    if elem.signed:
        return ("int", word - (1 << 256) if word >> 255 else word)
    return ("uint", word)


def _encode_for(value: _Value, elem: ast.Elementary, what: str) -> int:
    kind, val = value
    if elem.kind == "bool":
        if kind != "bool":
            raise _RevertSignal(f"{what}: expected bool, got {kind}")
        return val
    if elem.kind == "address":
        if kind != "address":
            raise _RevertSignal(f"{what}: expected address, got {kind}")
        return val
    if kind not in ("uint", "int"):
        raise _RevertSignal(f"{what}: expected {elem.kind}, got {kind}")
    if elem.signed:
        if not (INT_MIN <= val <= INT_MAX):
            raise _RevertSignal(f"{what}: {val} out of range for int256")
        return val & UINT_MAX
    if not (0 <= val < (1 << (8 * elem.width))):
        raise _RevertSignal(f"{what}: {val} out of range for {elem.kind}")
    return val


class _Interp:
    def __init__(self, vm: MiniVM, state: WorldState, alias: str, ctx: CallContext, step_limit: int):
        self.vm = vm
        self.state = state
        self.alias = alias
        self.contract = vm.contracts[alias]
        self.layout = vm.layouts[alias]
        self.registry = vm.registries[alias]
        self.ctx = ctx
        self.step_limit = step_limit
        self.steps = 0
        self.traces: list[TraceRecord] = []
        self.scopes: list[dict[str, list]] = [{}]

    # -- plumbing ---------------------------------------------------------

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise _StepLimitSignal()

    def bind_params(self, fn: ast.FunctionDecl) -> None:
        frame = self.scopes[0]
        for param, word in zip(fn.params, self.ctx.args):
            if word > UINT_MAX:
                raise _RevertSignal(f"argument {param.name}: not a 256-bit word")
            if not param.ty.signed and word >= (1 << (8 * param.ty.width)):
                raise _RevertSignal(f"argument {param.name}: does not fit {param.ty.kind}")
            frame[param.name] = [param.ty, _decode_stored(word, param.ty)]

    def encode_return(self, fn: ast.FunctionDecl, value: _Value | None) -> int | None:
        if value is None:
            return None
        if fn.returns is None:
            raise _RevertSignal(f"{fn.name} does not declare a return value")
        return _encode_for(value, fn.returns, "return value")

    def lookup_local(self, name: str) -> list | None:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    # -- statements -------------------------------------------------------

    def run_block(self, stmts: tuple[ast.Stmt, ...]) -> None:
        self.scopes.append({})
        try:
            for stmt in stmts:
                self.run_stmt(stmt)
        finally:
            self.scopes.pop()

    def run_stmt(self, stmt: ast.Stmt) -> None:
        if isinstance(stmt, ast.For):
            self.run_for(stmt)
            return
        self.tick()
        if isinstance(stmt, ast.Assign):
            self.run_assign(stmt)
        elif isinstance(stmt, ast.Require):
            cond = self.eval_bool(stmt.cond, "require condition")
            if not cond:
                raise _RevertSignal(stmt.message or "requirement failed")
        elif isinstance(stmt, ast.If):
            if self.eval_bool(stmt.cond, "if condition"):
                self.run_block(stmt.then)
            elif stmt.orelse is not None:
                self.run_block(stmt.orelse)
        elif isinstance(stmt, ast.Return):
            raise _ReturnSignal(self.eval(stmt.value) if stmt.value is not None else None)
        elif isinstance(stmt, ast.Pay):
            self.run_pay(stmt)
        elif isinstance(stmt, ast.LocalDecl):
            scope = self.scopes[-1]
            if stmt.name in scope:
                raise _RevertSignal(f"{stmt.name} already declared in this scope")
            value = self.eval(stmt.value)
            word = _encode_for(value, stmt.ty, f"local {stmt.name}")
            scope[stmt.name] = [stmt.ty, _decode_stored(word, stmt.ty)]
        elif isinstance(stmt, ast.Push):
            self.run_push(stmt)
        else:
            raise _RevertSignal(f"unsupported statement {type(stmt).__name__}")

    def run_for(self, stmt: ast.For) -> None:
        self.scopes.append({})
        try:
            init = self.eval(stmt.init)
            # The loop variable binds to an existing local or state variable if
            # one is visible; otherwise it becomes a uint256 local scoped to the loop.
            if self.lookup_local(stmt.var) is None and self.contract.state_var(stmt.var) is None:
                ty = ast.Elementary("uint256")
                word = _encode_for(init, ty, f"loop variable {stmt.var}")
                self.scopes[-1][stmt.var] = [ty, _decode_stored(word, ty)]
            else:
                self.store_named(stmt.var, init)
            while True:
                self.tick()  # one step per iteration boundary
                if not self.eval_bool(stmt.cond, "loop condition"):
                    break
                self.run_block(stmt.body)
                self.run_assign(ast.Assign(ast.Lvalue(stmt.step_var), "+=", stmt.step))
        finally:
            self.scopes.pop()

    def store_named(self, name: str, value: _Value) -> None:
        local = self.lookup_local(name)
        if local is not None:
            word = _encode_for(value, local[0], f"local {name}")
            local[1] = _decode_stored(word, local[0])
            return
        self.assign_state(ast.Lvalue(name), "=", value)

    def run_assign(self, stmt: ast.Assign) -> None:
        value = self.eval(stmt.value)
        local = self.lookup_local(stmt.target.name) if not stmt.target.indexes else None
        if local is not None:
            if stmt.op != "=":
                value = _arith(stmt.op[0], local[1], value)
            word = _encode_for(value, local[0], f"local {stmt.target.name}")
            local[1] = _decode_stored(word, local[0])
            return
        self.assign_state(stmt.target, stmt.op, value)

    def assign_state(self, target: ast.Lvalue, op: str, value: _Value) -> None:
        path, elem, addr = self.resolve_lvalue(target, for_write=True)
        if op != "=":
            current = self.read_location(elem, addr)
            value = _arith(op[0], current, value)
        word_value = _encode_for(value, elem, path.text)
        self.write_location(addr, word_value)

    def run_pay(self, stmt: ast.Pay) -> None:
        to_kind, to_addr = self.eval(stmt.to)
        if to_kind != "address":
            raise _RevertSignal("pay target must be an address")
        amount_kind, amount = self.eval(stmt.amount)
        if amount_kind not in ("uint", "int") or amount < 0:
            raise _RevertSignal("pay amount must be a non-negative integer")
        me = self.vm.contract_address(self.alias)
        if self.state.balance(me) < amount:
            raise _RevertSignal("insufficient contract balance for pay")
        self.state.accounts[me] = self.state.balance(me) - amount
        self.state.accounts[to_addr] = self.state.balance(to_addr) + amount

    def run_push(self, stmt: ast.Push) -> None:
        path, ty = self.type_lvalue_path(stmt.target)
        if not isinstance(ty, ast.DynArray):
            raise _RevertSignal(f"{path.text}: push target is not a dynamic array")
        if not isinstance(ty.elem, ast.Elementary):
            raise _RevertSignal(f"{path.text}: cannot push into array of composite elements")
        base = self.vm._resolve(self.alias, path)
        length = self.state.storage(self.alias).get(base.slot, 0)
        value = self.eval(stmt.value)
        word_value = _encode_for(value, ty.elem, f"{path.text}[{length}]")
        elem_addr = self.vm._resolve(self.alias, path.child(Index(length)))
        self.write_location(elem_addr, word_value)
        self.write_location(SlotAddress(base.slot, 0, 32), length + 1)

    # -- lvalue resolution --------------------------------------------------

    def type_lvalue_path(self, lvalue: ast.Lvalue):
        """Typed VariablePath for a state lvalue, evaluating index expressions."""
        var = self.contract.state_var(lvalue.name)
        if var is None:
            raise _RevertSignal(f"undefined identifier {lvalue.name!r}")
        ty: ast.TypeExpr = var.ty
        path = VariablePath(self.alias, lvalue.name)
        for index_expr in lvalue.indexes:
            if isinstance(ty, ast.Elementary):
                raise _RevertSignal(f"{path.text}: cannot index into {ty}")
            if isinstance(ty, ast.Mapping):
                path = path.child(Key(self.eval_key(index_expr, ty.key)))
                ty = ty.value
            elif isinstance(ty, ast.FixedArray):
                idx = self.eval_index(index_expr)
                if idx >= ty.length:
                    raise _RevertSignal(f"{path.text}: index {idx} out of bounds for {ty}")
                path = path.child(Index(idx))
                ty = ty.elem
            else:  # DynArray
                idx = self.eval_index(index_expr)
                base = self.vm._resolve(self.alias, path)
                length = self.state.storage(self.alias).get(base.slot, 0)
                if idx >= length:
                    raise _RevertSignal(f"{path.text}: index {idx} out of bounds (length {length})")
                path = path.child(Index(idx))
                ty = ty.elem
        return path, ty

    def resolve_lvalue(self, lvalue: ast.Lvalue, for_write: bool):
        path, ty = self.type_lvalue_path(lvalue)
        if not isinstance(ty, ast.Elementary):
            raise _RevertSignal(f"{path.text}: not a value-type location")
        addr = self.vm._resolve(self.alias, path)
        return path, ty, addr

    def eval_key(self, expr: ast.Expr, key_ty: ast.Elementary) -> int:
        kind, val = self.eval(expr)
        if key_ty.kind == "address":
            if kind != "address":
                raise _RevertSignal(f"mapping key must be an address, got {kind}")
            return val
        if key_ty.kind == "bool":
            if kind != "bool":
                raise _RevertSignal(f"mapping key must be a bool, got {kind}")
            return val
        if kind not in ("uint", "int"):
            raise _RevertSignal(f"mapping key must be numeric, got {kind}")
        if key_ty.signed:
            if not (INT_MIN <= val <= INT_MAX):
                raise _RevertSignal("mapping key out of range for int256")
            return val & UINT_MAX
        if not (0 <= val < (1 << (8 * key_ty.width))):
            raise _RevertSignal(f"mapping key {val} out of range for {key_ty.kind}")
        return val

    def eval_index(self, expr: ast.Expr) -> int:
        kind, val = self.eval(expr)
        if kind not in ("uint", "int") or val < 0:
            raise _RevertSignal("array index must be a non-negative integer")
        return val

    # -- storage access -----------------------------------------------------

    def read_location(self, elem: ast.Elementary, addr: SlotAddress) -> _Value:
        word = self.state.storage(self.alias).get(addr.slot, 0)
        return _decode_stored(extract_range(word, addr.offset, addr.width), elem)

    def write_location(self, addr: SlotAddress, value: int) -> None:
        slots = self.state.storage(self.alias)
        old_word = slots.get(addr.slot, 0)
        new_word = splice_range(old_word, addr.offset, addr.width, value)
        slots[addr.slot] = new_word
        self.traces.append(TraceRecord(
            event_index=0,
            step_index=len(self.traces),
            contract=self.alias,
            slot=addr.slot,
            byte_range=(addr.offset, addr.width),
            old_word=old_word,
            new_word=new_word,
        ))

    # -- expressions ---------------------------------------------------------

    def eval_bool(self, expr: ast.Expr, what: str) -> bool:
        kind, val = self.eval(expr)
        if kind != "bool":
            raise _RevertSignal(f"{what} must be boolean, got {kind}")
        return bool(val)

    def eval(self, expr: ast.Expr) -> _Value:
        if isinstance(expr, ast.Number):
            if expr.value > UINT_MAX:
                raise _RevertSignal("number literal exceeds 256 bits")
            return ("uint", expr.value)
        if isinstance(expr, ast.BoolLit):
            return ("bool", 1 if expr.value else 0)
        if isinstance(expr, ast.MsgSender):
            return ("address", self.ctx.sender)
        if isinstance(expr, ast.MsgValue):
            return ("uint", self.ctx.value)
        if isinstance(expr, ast.Lvalue):
            if not expr.indexes:
                local = self.lookup_local(expr.name)
                if local is not None:
                    return local[1]
            _, elem, addr = self.resolve_lvalue(expr, for_write=False)
            return self.read_location(elem, addr)
        if isinstance(expr, ast.Length):
            path, ty = self.type_lvalue_path(expr.target)
            if isinstance(ty, ast.DynArray):
                base = self.vm._resolve(self.alias, path)
                return ("uint", self.state.storage(self.alias).get(base.slot, 0))
            if isinstance(ty, ast.FixedArray):
                return ("uint", ty.length)
            raise _RevertSignal(f"{path.text}: .length on non-array")
        if isinstance(expr, ast.Unary):
            operand = self.eval(expr.operand)
            if operand[0] != "bool":
                raise _RevertSignal("operator ! needs a boolean")
            return ("bool", 0 if operand[1] else 1)
        if isinstance(expr, ast.Binary):
            return self.eval_binary(expr)
        raise _RevertSignal(f"unsupported expression {type(expr).__name__}")

    def eval_binary(self, expr: ast.Binary) -> _Value:
        op = expr.op
        if op in ("&&", "||"):
            left = self.eval_bool(expr.left, "logical operand")
            if op == "&&":
                if not left:
                    return ("bool", 0)
                return ("bool", 1 if self.eval_bool(expr.right, "logical operand") else 0)
            if left:
                return ("bool", 1)
            return ("bool", 1 if self.eval_bool(expr.right, "logical operand") else 0)

        left = self.eval(expr.left)
        right = self.eval(expr.right)
        if op in ("==", "!="):
            lk, rk = left[0], right[0]
            numeric = {"uint", "int"}
            if not (lk == rk or (lk in numeric and rk in numeric)):
                raise _RevertSignal(f"cannot compare {lk} with {rk}")
            equal = left[1] == right[1]
            return ("bool", 1 if equal == (op == "==") else 0)
        if op in ("<", "<=", ">", ">="):
            for side in (left, right):
                if side[0] not in ("uint", "int"):
                    raise _RevertSignal(f"ordering needs numeric operands, got {side[0]}")
            a, b = left[1], right[1]
            result = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
            return ("bool", 1 if result else 0)
        return _arith(op, left, right)


def _arith(op: str, left: _Value, right: _Value) -> _Value:
    for side in (left, right):
        if side[0] not in ("uint", "int"):
            raise _RevertSignal(f"arithmetic needs numeric operands, got {side[0]}")
    signed = left[0] == "int" or right[0] == "int"
    a, b = left[1], right[1]
    if op == "+":
        result = a + b
    elif op == "-":
        result = a - b
    elif op == "*":
        result = a * b
    elif op in ("/", "%"):
        if b == 0:
            raise _RevertSignal("division by zero")
        quotient = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            quotient = -quotient
        result = quotient if op == "/" else a - quotient * b
    else:
        raise _RevertSignal(f"unknown operator {op!r}")
    if signed:
        if not (INT_MIN <= result <= INT_MAX):
            raise _RevertSignal("arithmetic overflow (int256)")
        return ("int", result)
    if not (0 <= result <= UINT_MAX):
        raise _RevertSignal("arithmetic overflow" if result > 0 else "arithmetic underflow")
    return ("uint", result)


def retag_event(traces: list[TraceRecord], event_index: int) -> list[TraceRecord]:
    """Stamp an event index onto records produced by one execute_call."""
    return [replace(t, event_index=event_index) for t in traces]

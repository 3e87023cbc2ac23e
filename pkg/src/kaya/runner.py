"""Suite execution end to end: interpret DBDL, transform variables, deploy
pre-state, execute events, collect traces, decode addresses back to names."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .dbdl.ast import Expectation, TestCase, TestSuite
from .dbdl.validate import type_value_path, validate
from .errors import Diagnostic, ValidationFailed
from .layout import (
    AddressRegistry,
    SlotAddress,
    StorageLayout,
    VariablePath,
    extract_range,
    resolve_address,
    slot_count,
)
from .minisol.ast import ContractDecl, DynArray, Elementary, FixedArray, Mapping, SourceUnit, TypeExpr
from .vm import DEFAULT_STEP_LIMIT, CallContext, MiniVM, Status, TraceRecord, retag_event


@dataclass(frozen=True)
class RunOptions:
    step_limit: int = DEFAULT_STEP_LIMIT
    jobs: int = 1


@dataclass(frozen=True)
class DecodedWrite:
    """One storage write attributed to a named variable."""

    path: VariablePath
    old_value: int
    new_value: int
    event_index: int

    def to_json(self) -> dict:
        return {
            "path": self.path.text,
            "event": self.event_index,
            "old": hex(self.old_value),
            "new": hex(self.new_value),
        }


@dataclass
class RunResult:
    case: str
    event_statuses: list[Status]
    decoded_traces: list[DecodedWrite]
    initial_values: dict[str, int]
    final_values: dict[str, int]
    path_types: dict[str, Elementary]
    expectation_results: list[tuple[Expectation, bool]]
    unknown_writes: list[TraceRecord]

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "events": [status.to_json() for status in self.event_statuses],
            "variables": [
                {
                    "path": path,
                    "type": self.path_types[path].kind,
                    "initial": hex(self.initial_values[path]),
                    "final": hex(self.final_values[path]),
                }
                for path in sorted(self.final_values)
            ],
            "traces": [row.to_json() for row in self.decoded_traces],
            "expectations": [
                {"expr": exp.text, "pass": ok} for exp, ok in self.expectation_results
            ],
            "unknown_writes": [trace.to_json() for trace in self.unknown_writes],
        }


def transform_variables(
    layout: StorageLayout,
    params: list[tuple[VariablePath, int]],
    registry: AddressRegistry,
) -> list[tuple[int, tuple[int, int], int]]:
    """Pre-state params as raw (slot, byte_range, word) write instructions."""
    out = []
    for path, value in params:
        addr = resolve_address(layout, path, registry)
        out.append((addr.slot, (addr.offset, addr.width), value))
    return out


def run_suite(
    suite: TestSuite,
    sources: list[SourceUnit],
    options: RunOptions = RunOptions(),
) -> list[RunResult]:
    """Execute every case; refuses the whole suite if validation fails."""
    contracts: dict[str, ContractDecl] = {}
    for unit in sources:
        for contract in unit.contracts:
            if contract.name in contracts:
                raise ValidationFailed([_dup_contract(contract.name)])
            contracts[contract.name] = contract
    diagnostics = validate(suite, list(contracts.values()))
    if diagnostics:
        raise ValidationFailed(diagnostics)
    if options.jobs > 1:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            return list(pool.map(lambda c: run_case(c, contracts, options), suite.cases))
    return [run_case(case, contracts, options) for case in suite.cases]


def _dup_contract(name: str) -> Diagnostic:
    return Diagnostic("duplicate-name", f"contract {name!r} defined in more than one source")


def run_case(case: TestCase, contracts: dict[str, ContractDecl], options: RunOptions) -> RunResult:
    refs = {ref.alias: contracts[ref.alias] for ref in case.contract_refs}
    vm = MiniVM(refs)

    balances = {acct.address: acct.balance for acct in case.accounts}
    typed_params = []
    named_paths: dict[str, tuple[str, VariablePath]] = {}
    for param in case.prestate:
        typed, _ = type_value_path(param.path, refs[param.path.contract])
        typed_params.append((param.path.contract, typed, param.value.value))
        named_paths[typed.text] = (param.path.contract, typed)
    typed_expectations = []
    for exp in case.expectations:
        typed, elem = type_value_path(exp.path, refs[exp.path.contract])
        typed_expectations.append((exp, typed, elem))
        named_paths[typed.text] = (exp.path.contract, typed)

    state = vm.deploy_prestate(balances, typed_params)
    initial_state = state.clone()

    statuses: list[Status] = []
    traces: list[TraceRecord] = []
    for index, event in enumerate(case.events):
        args = tuple(lit.value for lit in event.args)
        ctx_sender = case.account(event.sender).address
        outcome = vm.execute_call(
            state, event.contract, event.function, CallContext(ctx_sender, event.value, args), options.step_limit
        )
        statuses.append(outcome.status)
        traces.extend(retag_event(outcome.traces, index))

    decoded, unknown = decode_traces(vm.layouts, vm.registries, traces)
    for row in decoded:
        named_paths.setdefault(row.path.text, (row.path.contract, row.path))

    initial_values: dict[str, int] = {}
    final_values: dict[str, int] = {}
    path_types: dict[str, Elementary] = {}
    for text, (alias, typed) in named_paths.items():
        addr = resolve_address(vm.layouts[alias], typed, vm.registries[alias])
        initial_values[text] = extract_range(initial_state.storage(alias).get(addr.slot, 0), addr.offset, addr.width)
        final_values[text] = extract_range(state.storage(alias).get(addr.slot, 0), addr.offset, addr.width)
        path_types[text] = _terminal_elem(refs[alias], typed)

    expectation_results = []
    for exp, typed, elem in typed_expectations:
        actual = final_values[typed.text]
        expectation_results.append((exp, _compare(actual, exp.comparator, exp.expected.value, elem)))

    return RunResult(
        case=case.name,
        event_statuses=statuses,
        decoded_traces=decoded,
        initial_values=initial_values,
        final_values=final_values,
        path_types=path_types,
        expectation_results=expectation_results,
        unknown_writes=unknown,
    )


def _terminal_elem(contract: ContractDecl, path: VariablePath) -> Elementary:
    ty: TypeExpr = contract.state_var(path.root).ty
    for _ in path.accessors:
        ty = ty.value if isinstance(ty, Mapping) else ty.elem
    # interior nodes (mapping/array bases) surface as their raw base word
    return ty if isinstance(ty, Elementary) else Elementary("uint256")


def _signed(word: int) -> int:
    return word - (1 << 256) if word >> 255 else word


def _compare(actual_word: int, comparator: str, expected_word: int, elem: Elementary) -> bool:
    if elem.signed:
        actual, expected = _signed(actual_word), _signed(expected_word)
    else:
        actual, expected = actual_word, expected_word
    return {
        "==": actual == expected,
        "!=": actual != expected,
        "<": actual < expected,
        "<=": actual <= expected,
        ">": actual > expected,
        ">=": actual >= expected,
    }[comparator]


def decode_traces(
    layouts: dict[str, StorageLayout],
    registries: dict[str, AddressRegistry],
    traces: list[TraceRecord],
) -> tuple[list[DecodedWrite], list[TraceRecord]]:
    """Attribute every trace to named variables; undecodable writes are surfaced raw."""
    rows: list[DecodedWrite] = []
    unknown: list[TraceRecord] = []
    for trace in traces:
        layout = layouts.get(trace.contract)
        registry = registries.get(trace.contract)
        if layout is None or registry is None:
            unknown.append(trace)
            continue
        parts = _overlapping(layout, registry, trace.slot, trace.byte_range)
        if not parts:
            unknown.append(trace)
            continue
        for path, offset, width in parts:
            rows.append(DecodedWrite(
                path=path,
                old_value=extract_range(trace.old_word, offset, width),
                new_value=extract_range(trace.new_word, offset, width),
                event_index=trace.event_index,
            ))
    return rows, unknown


def _overlapping(
    layout: StorageLayout, registry: AddressRegistry, slot: int, byte_range: tuple[int, int]
) -> list[tuple[VariablePath, int, int]]:
    """Most-specific candidate ranges intersecting the written byte range."""
    q_off, q_width = byte_range
    q_end = q_off + q_width
    candidates: dict[tuple[int, int], tuple[VariablePath, int, int]] = {}

    def consider(path: VariablePath, offset: int, width: int) -> None:
        if offset < q_end and q_off < offset + width:
            key = (offset, width)
            known = candidates.get(key)
            if known is None or len(path.accessors) > len(known[0].accessors):
                candidates[key] = (path, offset, width)

    if slot <= layout.next_free_slot:
        for name, (base, ty) in layout.vars.items():
            root = VariablePath(layout.contract, name)
            if isinstance(ty, Elementary):
                if slot == base.slot:
                    consider(root, base.offset, base.width)
            elif isinstance(ty, (Mapping, DynArray)):
                if slot == base.slot:
                    consider(root, 0, 32)
            elif isinstance(ty, FixedArray) and base.slot <= slot < base.slot + slot_count(ty):
                _consider_fixed(root, ty, base.slot, slot, consider)
    for path, offset, width in registry.lookup(slot):
        consider(path, offset, width)

    entries = list(candidates.values())
    minimal = [
        entry for entry in entries
        if not any(
            other is not entry
            and other[1] >= entry[1]
            and other[1] + other[2] <= entry[1] + entry[2]
            and (other[1], other[2]) != (entry[1], entry[2])
            for other in entries
        )
    ]
    minimal.sort(key=lambda e: e[1])
    return minimal


def _consider_fixed(path: VariablePath, ty: FixedArray, base_slot: int, slot: int, consider) -> None:
    from .layout import Index

    if isinstance(ty.elem, Elementary):
        per = 32 // ty.elem.width
        first = (slot - base_slot) * per
        for local in range(per):
            index = first + local
            if index >= ty.length:
                break
            consider(path.child(Index(index)), local * ty.elem.width, ty.elem.width)
        return
    stride = slot_count(ty.elem)
    index = (slot - base_slot) // stride
    if index >= ty.length:
        return
    child = path.child(Index(index))
    inner_base = base_slot + index * stride
    if isinstance(ty.elem, FixedArray):
        _consider_fixed(child, ty.elem, inner_base, slot, consider)
    elif slot == inner_base:
        consider(child, 0, 32)

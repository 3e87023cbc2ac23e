"""Runner orchestration tests plus the slot-pipeline vs path-oracle differential."""

import random

import pytest

from kaya.dbdl import parse_dbdl
from kaya.errors import ValidationFailed
from kaya.layout import AddressRegistry, VariablePath, compute_layout
from kaya.minisol import parse_source
from kaya.minisol.ast import SourceUnit
from kaya.runner import RunOptions, decode_traces, run_suite, transform_variables
from kaya.vm import Revert, StepLimitExceeded, Success, TraceRecord

import gen
from diffdrive import assert_differential_agreement

COUNTER = "contract C { uint256 x; function inc() { x += 1; } function bad() { require(false, \"no\"); } }"


def _run(source: str, suite_text: str, **opts):
    unit = parse_source(source)
    suite = parse_dbdl(suite_text)
    return run_suite(suite, [unit], RunOptions(**opts))


def test_two_increments():
    results = _run(
        COUNTER,
        'testcase "t" { contract C from "c" account a { balance: 1 ether } '
        "prestate { C.x = 0 } events { call C.inc() from a call C.inc() from a } "
        "expect { C.x == 2 } }",
    )
    result = results[0]
    assert result.final_values["C.x"] == 2
    assert [s for s in result.event_statuses] == [Success(None), Success(None)]
    assert len(result.decoded_traces) == 2
    assert [(row.old_value, row.new_value) for row in result.decoded_traces] == [(0, 1), (1, 2)]
    assert result.expectation_results[0][1] is True
    assert result.unknown_writes == []


def test_revert_in_second_event_continues():
    results = _run(
        COUNTER,
        'testcase "t" { contract C from "c" account a { balance: 1 ether } '
        "events { call C.inc() from a call C.bad() from a call C.inc() from a } "
        "expect { C.x == 2 } }",
    )
    result = results[0]
    kinds = [type(s).__name__ for s in result.event_statuses]
    assert kinds == ["Success", "Revert", "Success"]
    assert result.final_values["C.x"] == 2
    assert result.expectation_results[0][1] is True
    # traces from the reverted call are discarded
    assert [row.event_index for row in result.decoded_traces] == [0, 2]


def test_snailthrone_earnings_increase(fixtures_dir):
    source = (fixtures_dir / "contracts" / "snailthrone.msol").read_text(encoding="utf-8")
    suite_text = (fixtures_dir / "suites" / "snailthrone_basic.dbdl").read_text(encoding="utf-8")
    results = run_suite(parse_dbdl(suite_text), [parse_source(source)], RunOptions())
    result = results[0]
    assert all(isinstance(s, Success) for s in result.event_statuses)
    player = next(p for p in result.final_values if p.startswith("SnailThrone.hatcherySnail["))
    assert result.final_values[player] == 50
    earnings_path = player.replace("hatcherySnail", "playerEarnings")
    # earnings were credited by the sell, then withdrawn to zero
    assert result.initial_values[earnings_path] == 0
    assert result.final_values[earnings_path] == 0
    assert all(ok for _, ok in result.expectation_results)


def test_validation_refusal():
    with pytest.raises(ValidationFailed):
        _run(COUNTER, 'testcase "t" { contract C from "c" account a { balance: 1 ether } events { call C.nope() from a } }')


def test_transform_variables_examples():
    unit = parse_source("contract C { uint128 a; uint128 b; uint256 x; }")
    layout = compute_layout(unit.contracts[0])
    registry = AddressRegistry()
    assert transform_variables(layout, [], registry) == []
    out = transform_variables(layout, [(VariablePath("C", "x"), 7)], registry)
    assert out == [(1, (0, 32), 7)]
    packed = transform_variables(
        layout, [(VariablePath("C", "a"), 5), (VariablePath("C", "b"), 3)], registry
    )
    assert packed == [(0, (0, 16), 5), (0, (16, 16), 3)]


def test_decode_full_word_write_splits_packed_vars():
    unit = parse_source("contract C { uint128 a; uint128 b; }")
    layout = compute_layout(unit.contracts[0])
    registry = AddressRegistry()
    word = (3 << 128) | 5
    trace = TraceRecord(0, 0, "C", 0, (0, 32), 0, word)
    rows, unknown = decode_traces({"C": layout}, {"C": registry}, [trace])
    assert unknown == []
    assert [(r.path.text, r.old_value, r.new_value) for r in rows] == [
        ("C.a", 0, 5),
        ("C.b", 0, 3),
    ]


def test_decode_underived_slot_is_unknown():
    unit = parse_source("contract C { uint256 x; }")
    layout = compute_layout(unit.contracts[0])
    trace = TraceRecord(0, 0, "C", 0xDEADBEEF**4, (0, 32), 0, 1)
    rows, unknown = decode_traces({"C": layout}, {"C": AddressRegistry()}, [trace])
    assert rows == []
    assert unknown == [trace]


def test_run_result_json_schema_shape():
    result = _run(
        COUNTER,
        'testcase "t" { contract C from "c" account a { balance: 1 ether } '
        "events { call C.inc() from a } expect { C.x == 1 } }",
    )[0]
    doc = result.to_json()
    assert doc["case"] == "t"
    assert doc["events"] == [{"status": "success"}]
    assert doc["variables"] == [{"path": "C.x", "type": "uint256", "initial": "0x0", "final": "0x1"}]
    assert doc["traces"] == [{"path": "C.x", "event": 0, "old": "0x0", "new": "0x1"}]
    assert doc["expectations"] == [{"expr": "C.x == 1", "pass": True}]
    assert doc["unknown_writes"] == []


def test_determinism_two_runs_identical():
    rng = random.Random(20)
    suite, contracts = gen.gen_suite(rng)
    unit = SourceUnit(contracts=tuple(contracts))
    first = run_suite(suite, [unit], RunOptions())
    second = run_suite(suite, [unit], RunOptions())
    assert first == second


def test_parallel_matches_serial():
    rng = random.Random(21)
    suite, contracts = gen.gen_suite(rng)
    while len(suite.cases) < 3:
        suite, contracts = gen.gen_suite(rng)
    unit = SourceUnit(contracts=tuple(contracts))
    serial = run_suite(suite, [unit], RunOptions(jobs=1))
    parallel = run_suite(suite, [unit], RunOptions(jobs=4))
    assert serial == parallel
    assert [r.case for r in parallel] == [c.name for c in suite.cases]


def test_differential_small_batch():
    cases, _ = assert_differential_agreement(seed=22, n_suites=25)
    assert cases >= 25


def test_replay_decoded_traces_reconstructs_finals():
    rng = random.Random(23)
    for _ in range(30):
        suite, contracts = gen.gen_suite(rng)
        unit = SourceUnit(contracts=tuple(contracts))
        for result in run_suite(suite, [unit], RunOptions()):
            replayed = dict(result.initial_values)
            for row in result.decoded_traces:
                replayed[row.path.text] = row.new_value
            assert replayed == result.final_values

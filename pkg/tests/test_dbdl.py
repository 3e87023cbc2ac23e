"""DBDL parsing, canonical formatting, and validation tests."""

import random

import pytest

from kaya import dbdl
from kaya.dbdl import (
    AccountDecl,
    Expectation,
    FrontendEvent,
    Literal,
    RawAccessor,
    RawPath,
    TestCase,
    TestSuite,
    account_address,
    format_amount,
    format_dbdl,
    parse_dbdl,
    validate,
)
from kaya.errors import ParseError
from kaya.minisol import parse_source

import gen
from keccak_reference import keccak256_reference

MINIMAL = 'testcase "t" { contract C from "c.msol" account a { balance: 1 ether } events { call C.f() from a } }'


def test_minimal_case():
    suite = parse_dbdl(MINIMAL)
    assert len(suite.cases) == 1
    case = suite.cases[0]
    assert case.name == "t"
    assert case.contract_refs == (dbdl.ContractRef("C", "c.msol"),)
    assert case.accounts == (AccountDecl("a", 10**18),)
    assert case.events == (FrontendEvent("C", "f", (), "a", 0),)
    assert case.prestate == ()
    assert case.expectations == ()


def test_event_with_args_and_value():
    suite = parse_dbdl(
        'testcase "t" { contract C from "c.msol" account a { balance: 2 ether } '
        "events { call C.buy(3) from a value 1 ether } }"
    )
    event = suite.cases[0].events[0]
    assert event.function == "buy"
    assert event.args == (Literal("number", 3),)
    assert event.sender == "a"
    assert event.value == 10**18


def test_prestate_alias_key_resolves_to_address():
    suite = parse_dbdl(
        'testcase "t" { contract C from "c.msol" account a { balance: 1 ether } '
        "prestate { C.hatcherySnail[a] = 100 } events { call C.f() from a } }"
    )
    param = suite.cases[0].prestate[0]
    assert param.path.root == "hatcherySnail"
    assert param.path.accessors == (RawAccessor(account_address("a"), alias="a"),)
    assert param.value == Literal("number", 100)


def test_account_address_matches_reference_keccak():
    expected = int.from_bytes(keccak256_reference(b"kaya:alice"), "big") & ((1 << 160) - 1)
    assert account_address("alice") == expected
    assert account_address("alice") == 0xC6D317178B8E707E17EBFC9FD5062FF5731C0F8C


def test_unknown_alias_rejected_at_parse():
    with pytest.raises(ParseError) as exc:
        parse_dbdl('testcase "t" { contract C from "c" events { call C.f() from ghost } }')
    assert exc.value.diagnostics[0].code == "unknown-alias"


def test_ether_wei_conversion_exact():
    for n in (1, 3, 1000, 123456):
        suite = parse_dbdl(
            f'testcase "t" {{ contract C from "c" account a {{ balance: {n} ether }} events {{ call C.f() from a }} }}'
        )
        assert suite.cases[0].accounts[0].balance == n * 10**18


def test_format_amount_canonicalization():
    assert format_amount(10**18) == "1 ether"
    assert format_amount(3 * 10**18) == "3 ether"
    assert format_amount(10**18 + 1) == f"{10**18 + 1} wei"
    assert format_amount(0) == "0 wei"


def test_format_empty_suite():
    assert format_dbdl(TestSuite(())) == ""


def test_balance_printed_as_ether():
    suite = parse_dbdl(MINIMAL)
    assert "balance: 1 ether" in format_dbdl(suite)


def test_round_trip_fixture_suites(fixtures_dir):
    for name in ("snailthrone_basic.dbdl", "snailthrone_sweep.dbdl"):
        text = (fixtures_dir / "suites" / name).read_text(encoding="utf-8")
        suite = parse_dbdl(text)
        assert parse_dbdl(format_dbdl(suite)) == suite


def test_round_trip_generated_corpus():
    rng = random.Random(7)
    for _ in range(120):
        suite, _ = gen.gen_suite(rng)
        printed = format_dbdl(suite)
        reparsed = parse_dbdl(printed)
        assert reparsed == suite
        assert parse_dbdl(format_dbdl(reparsed)) == reparsed


def _contracts(src: str):
    return list(parse_source(src).contracts)


def test_validate_unknown_function():
    suite = parse_dbdl(MINIMAL)
    contracts = _contracts("contract C { uint256 x; function g() { x = 1; } }")
    diags = validate(suite, contracts)
    assert [d.code for d in diags] == ["unknown-function"]


def test_validate_non_payable_value():
    suite = parse_dbdl(
        'testcase "t" { contract C from "c" account a { balance: 2 ether } '
        "events { call C.f() from a value 1 wei } }"
    )
    contracts = _contracts("contract C { uint256 x; function f() { x = 1; } }")
    diags = validate(suite, contracts)
    assert [d.code for d in diags] == ["non-payable-value"]


def test_validate_arity_mismatch():
    suite = parse_dbdl(
        'testcase "t" { contract C from "c" account a { balance: 1 ether } events { call C.f(1, 2) from a } }'
    )
    contracts = _contracts("contract C { uint256 x; function f(uint256 n) { x = n; } }")
    assert [d.code for d in validate(suite, contracts)] == ["arity-mismatch"]


def test_validate_path_against_types():
    contracts = _contracts(
        "contract C { mapping(address=>uint256) m; uint8 tiny; uint256[3] arr; function f() { tiny = 1; } }"
    )
    bad = parse_dbdl(
        'testcase "t" { contract C from "c" account a { balance: 1 ether } '
        "prestate { C.m = 5 C.ghost = 1 C.tiny = 300 C.arr[a] = 1 C.arr[9] = 1 } events { call C.f() from a } }"
    )
    codes = sorted(d.code for d in validate(bad, contracts))
    assert codes == ["type-mismatch"] * 4 + ["value-overflow"]


def test_validate_snailthrone_sweep_clean(fixtures_dir):
    text = (fixtures_dir / "suites" / "snailthrone_sweep.dbdl").read_text(encoding="utf-8")
    source = (fixtures_dir / "contracts" / "snailthrone.msol").read_text(encoding="utf-8")
    suite = parse_dbdl(text)
    assert validate(suite, _contracts(source)) == []


def test_validate_generated_suites_clean():
    rng = random.Random(8)
    for _ in range(60):
        suite, contracts = gen.gen_suite(rng)
        diags = validate(suite, contracts)
        assert diags == [], [d.render() for d in diags]


def test_validate_duplicate_case_names():
    case_text = (
        'testcase "same" { contract C from "c" account a { balance: 1 ether } events { call C.f() from a } }'
    )
    suite = parse_dbdl(case_text + "\n" + case_text)
    contracts = _contracts("contract C { uint256 x; function f() { x = 1; } }")
    assert "duplicate-name" in [d.code for d in validate(suite, contracts)]


def test_validate_mapping_key_rules():
    contracts = _contracts(
        "contract C { mapping(uint8=>uint256) small; mapping(address=>uint256) byaddr; function f() { small[0] = 1; } }"
    )
    suite = parse_dbdl(
        'testcase "t" { contract C from "c" account a { balance: 1 ether } '
        "prestate { C.small[999] = 1 C.byaddr[a] = 2 C.byaddr[0x1234] = 3 } "
        "events { call C.f() from a } }"
    )
    codes = [d.code for d in validate(suite, contracts)]
    assert codes == ["type-mismatch"]  # only the uint8 key overflow

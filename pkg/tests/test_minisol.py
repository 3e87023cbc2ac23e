"""Parser, variable extraction, and round-trip tests for MiniSol."""

import random

import pytest

from kaya.errors import ParseError
from kaya.minisol import (
    Assign,
    Elementary,
    Lvalue,
    Mapping,
    MsgSender,
    extract_variables,
    format_source,
    parse_source,
)

import gen


def test_single_state_var():
    unit = parse_source("contract C { uint256 x; }")
    contract = unit.contracts[0]
    assert contract.name == "C"
    assert [(v.name, v.ty, v.decl_index) for v in contract.state_vars] == [("x", Elementary("uint256"), 0)]


def test_duplicate_state_var_rejected():
    with pytest.raises(ParseError) as exc:
        parse_source("contract C { uint256 x; uint256 x; }")
    assert exc.value.diagnostics[0].code == "duplicate-name"
    assert "x" in exc.value.diagnostics[0].message


def test_duplicate_contract_rejected():
    with pytest.raises(ParseError) as exc:
        parse_source("contract C { } contract C { }")
    assert exc.value.diagnostics[0].code == "duplicate-name"


def test_mapping_and_function():
    unit = parse_source(
        "contract C { mapping(address=>uint256) m; function f(uint256 a) { m[msg.sender] = a; } }"
    )
    contract = unit.contracts[0]
    assert contract.state_vars[0].ty == Mapping(Elementary("address"), Elementary("uint256"))
    fn = contract.functions[0]
    assert fn.name == "f"
    assert [p.name for p in fn.params] == ["a"]
    assert fn.body == (Assign(Lvalue("m", (MsgSender(),)), "=", Lvalue("a")),)


def test_nested_types_parse():
    unit = parse_source(
        "contract C { mapping(address=>mapping(uint256=>bool)) mm; uint8[4] fixed; uint256[] dyn; mapping(uint64=>uint128[3])[] weird; }"
    )
    types = [str(v.ty) for v in unit.contracts[0].state_vars]
    assert types == [
        "mapping(address => mapping(uint256 => bool))",
        "uint8[4]",
        "uint256[]",
        "mapping(uint64 => uint128[3])[]",
    ]


def test_statement_forms_parse():
    src = """
    // full statement coverage
    contract C {
        uint256 x;
        uint256[] arr;
        function f(uint256 a, address who) payable returns (uint256) {
            uint256 tmp = a * 2 + 1;
            x += tmp % 7;
            require(x < 1000, "too big");
            if (x > 10) {
                x -= 1;
            } else {
                x *= 2;
            }
            for (i = 0; i < 3; i += 1) {
                arr.push(i);
            }
            pay(who, 1);
            return arr.length;
        }
    }
    """
    unit = parse_source(src)
    fn = unit.contracts[0].functions[0]
    assert fn.payable
    assert fn.returns == Elementary("uint256")
    assert len(fn.body) == 7


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_source("contract C {\n  uint256 ;\n}")
    diag = exc.value.diagnostics[0]
    assert diag.code == "syntax"
    assert diag.line == 2
    assert diag.col >= 1


def test_diagnostic_positions_inside_text_bounds():
    bad_inputs = [
        "contract",
        "contract C {",
        "contract C { uint257 x; }",
        "contract C { uint256 x }",
        "contract C { function f( { } }",
        "contract C { function f() { x = ; } }",
        "contract C { function f() { @ } }",
    ]
    for text in bad_inputs:
        with pytest.raises(ParseError) as exc:
            parse_source(text)
        lines = text.split("\n")
        diag = exc.value.diagnostics[0]
        assert 1 <= diag.line <= len(lines)
        assert 1 <= diag.col <= len(lines[diag.line - 1]) + 1


def test_extract_variables_order():
    unit = parse_source("contract C { uint256 a; bool b; address c; }")
    out = extract_variables(unit.contracts[0])
    assert [(n, i) for n, _, i in out] == [("a", 0), ("b", 1), ("c", 2)]


def test_extract_variables_empty_contract():
    unit = parse_source("contract C { }")
    assert extract_variables(unit.contracts[0]) == []


def test_extract_variables_snailthrone_fixture(fixtures_dir):
    text = (fixtures_dir / "contracts" / "snailthrone.msol").read_text(encoding="utf-8")
    unit = parse_source(text)
    names = [n for n, _, _ in extract_variables(unit.contracts[0])]
    assert "hatcherySnail" in names
    assert "playerEarnings" in names


def test_format_parse_round_trip_examples():
    sources = [
        "contract C { uint256 x; }",
        "contract C { mapping(address=>uint256) m; function f(uint256 a) { m[msg.sender] = a + 1 * 2; } }",
        "contract C { function g() { x = 1 - 2 - 3; y = 1 - (2 - 3); z = (1 + 2) * 3; w = 1 + 2 * 3; } }",
        "contract C { function g() { b = !(x < 1) && y == 2 || !f; } }",
    ]
    for text in sources:
        first = parse_source(text)
        second = parse_source(format_source(first))
        assert first == second


def test_round_trip_on_generated_corpus():
    rng = random.Random(1)
    for _ in range(120):
        unit = gen.gen_source_unit(rng)
        printed = parse_source(format_source(unit))
        assert printed == unit
        assert parse_source(format_source(printed)) == printed


def test_extract_preserves_order_on_generated_contracts():
    rng = random.Random(2)
    for _ in range(100):
        contract = gen.gen_contract(rng)
        out = extract_variables(contract)
        assert len(out) == len(contract.state_vars)
        assert [i for _, _, i in out] == list(range(len(out)))
        assert [n for n, _, _ in out] == [v.name for v in contract.state_vars]

"""Canonical DBDL pretty-printer: parse_dbdl(format_dbdl(s)) == s."""

from __future__ import annotations

from .ast import WEI_PER_ETHER, TestCase, TestSuite


def format_amount(wei: int) -> str:
    """Largest exact unit: ether when evenly divisible, else wei."""
    if wei % WEI_PER_ETHER == 0 and wei > 0:
        return f"{wei // WEI_PER_ETHER} ether"
    return f"{wei} wei"


def format_dbdl(suite: TestSuite) -> str:
    if not suite.cases:
        return ""
    return "\n".join(_format_case(case) for case in suite.cases)


def _format_case(case: TestCase) -> str:
    lines = [f'testcase "{case.name}" {{']
    for ref in case.contract_refs:
        lines.append(f'    contract {ref.alias} from "{ref.source}"')
    for acct in case.accounts:
        lines.append(f"    account {acct.alias} {{")
        lines.append(f"        balance: {format_amount(acct.balance)}")
        lines.append("    }")
    if case.prestate:
        lines.append("    prestate {")
        for param in case.prestate:
            lines.append(f"        {param.path.text} = {param.value.render()}")
        lines.append("    }")
    lines.append("    events {")
    for event in case.events:
        args = ", ".join(lit.render() for lit in event.args)
        line = f"        call {event.contract}.{event.function}({args}) from {event.sender}"
        if event.value:
            line += f" value {format_amount(event.value)}"
        lines.append(line)
    lines.append("    }")
    if case.expectations:
        lines.append("    expect {")
        for exp in case.expectations:
            lines.append(f"        {exp.text}")
        lines.append("    }")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Report generation: per-variable change tables and cross-case correlations.

Words are interpreted signed iff the declared type is int256; correlation is
computed over exact integers in double-precision floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import KayaError
from .minisol.ast import Elementary
from .runner import RunResult

DEFAULT_THRESHOLD = 0.8
MIN_POINTS = 3


class UnsupportedFormatError(KayaError):
    pass


@dataclass(frozen=True)
class VariableChange:
    path: str
    initial: int  # raw word
    final: int  # raw word
    delta: int  # signed difference under the declared type
    write_count: int


@dataclass(frozen=True)
class CorrelationFinding:
    a: str
    b: str
    r: float
    n: int


@dataclass
class CaseReport:
    name: str
    changes: list[VariableChange]
    expectations: list[tuple[str, bool]]


@dataclass
class AnalysisReport:
    cases: list[CaseReport]
    correlations: list[CorrelationFinding]


def _decode(word: int, elem: Elementary) -> int:
    if elem.signed and word >> 255:
        return word - (1 << 256)
    return word


def summarize_changes(result: RunResult) -> list[VariableChange]:
    """One row per named path, sorted by canonical path text."""
    write_counts: dict[str, int] = {}
    for row in result.decoded_traces:
        write_counts[row.path.text] = write_counts.get(row.path.text, 0) + 1
    rows = []
    for path in sorted(set(result.initial_values) | set(result.final_values)):
        elem = result.path_types[path]
        initial = result.initial_values.get(path, 0)
        final = result.final_values.get(path, 0)
        rows.append(VariableChange(
            path=path,
            initial=initial,
            final=final,
            delta=_decode(final, elem) - _decode(initial, elem),
            write_count=write_counts.get(path, 0),
        ))
    return rows


def pearson(xs: list[int], ys: list[int]) -> float | None:
    """Sample Pearson r; None when either series is constant.

    Accumulates in exact integer arithmetic (so case order cannot perturb the
    result and 256-bit words cannot overflow) and divides once at the end.
    """
    n = len(xs)
    sx, sy = sum(xs), sum(ys)
    sxx = sum(x * x for x in xs)
    syy = sum(y * y for y in ys)
    sxy = sum(x * y for x, y in zip(xs, ys))
    num = n * sxy - sx * sy
    var_x = n * sxx - sx * sx
    var_y = n * syy - sy * sy
    if var_x == 0 or var_y == 0:
        return None
    r_squared = Fraction(num * num, var_x * var_y)
    magnitude = math.sqrt(float(r_squared))
    return magnitude if num >= 0 else -magnitude


def correlate(
    results: list[RunResult],
    threshold: float = DEFAULT_THRESHOLD,
    min_points: int = MIN_POINTS,
) -> list[CorrelationFinding]:
    """Pairwise correlations of final values across cases, strongest |r| first filtered by threshold."""
    if len(results) < min_points:
        return []
    shared = set(results[0].final_values)
    for result in results[1:]:
        shared &= set(result.final_values)
    series: dict[str, list[int]] = {}
    for path in shared:
        elem = results[0].path_types[path]
        series[path] = [_decode(result.final_values[path], elem) for result in results]
    findings = []
    ordered = sorted(shared)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            r = pearson(series[a], series[b])
            if r is None or abs(r) < threshold:
                continue
            findings.append(CorrelationFinding(a, b, r, len(results)))
    return findings


def analyze(results: list[RunResult], threshold: float = DEFAULT_THRESHOLD) -> AnalysisReport:
    cases = [
        CaseReport(
            name=result.case,
            changes=summarize_changes(result),
            expectations=[(exp.text, ok) for exp, ok in result.expectation_results],
        )
        for result in results
    ]
    return AnalysisReport(cases, correlate(results, threshold))


def render_report(report: AnalysisReport, format: str = "text") -> bytes:
    if format == "json":
        return _render_json(report)
    if format == "text":
        return _render_text(report)
    raise UnsupportedFormatError(f"unsupported report format {format!r}")


def _render_json(report: AnalysisReport) -> bytes:
    doc = {
        "cases": [
            {
                "name": case.name,
                "changes": [
                    {
                        "path": change.path,
                        "initial": hex(change.initial),
                        "final": hex(change.final),
                        "delta": str(change.delta),
                        "writes": change.write_count,
                    }
                    for change in case.changes
                ],
                "expectations": [{"expr": expr, "pass": ok} for expr, ok in case.expectations],
            }
            for case in report.cases
        ],
        "correlations": [
            {"a": f.a, "b": f.b, "r": f.r, "n": f.n} for f in report.correlations
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _render_text(report: AnalysisReport) -> bytes:
    lines: list[str] = []
    for case in report.cases:
        lines.append(f"case {case.name}")
        if case.changes:
            header = ("variable", "initial", "final", "delta", "writes")
            table = [header] + [
                (c.path, str(c.initial), str(c.final), f"{c.delta:+d}", str(c.write_count))
                for c in case.changes
            ]
            widths = [max(len(row[col]) for row in table) for col in range(5)]
            for row in table:
                lines.append("  " + "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        for expr, ok in case.expectations:
            lines.append(f"  expect {expr} : {'pass' if ok else 'FAIL'}")
        lines.append("")
    lines.append(f"correlations ({len(report.correlations)})")
    for f in report.correlations:
        lines.append(f"  {f.a} ~ {f.b}  r={f.r:+.6f}  n={f.n}")
    return ("\n".join(lines) + "\n").encode("utf-8")

"""Driver comparing the slot-level pipeline against the path-keyed oracle."""

from __future__ import annotations

import random

from kaya.minisol.ast import SourceUnit
from kaya.runner import RunOptions, run_suite
from kaya.vm import Revert, StepLimitExceeded, Success

import gen
from oracle_interp import oracle_run_case


def status_kind(status):
    if isinstance(status, Success):
        return ("success", status.ret)
    if isinstance(status, Revert):
        return ("revert", None)
    assert isinstance(status, StepLimitExceeded)
    return ("step_limit", None)


def assert_differential_agreement(seed: int, n_suites: int) -> tuple[int, int]:
    """Run generated suites through both pipelines; returns (cases, contracts) compared."""
    rng = random.Random(seed)
    cases_compared = 0
    contracts_generated = 0
    for _ in range(n_suites):
        suite, contracts = gen.gen_suite(rng)
        contracts_generated += len(contracts)
        unit = SourceUnit(contracts=tuple(contracts))
        results = run_suite(suite, [unit], RunOptions())
        by_name = {c.name: c for c in contracts}
        for case, result in zip(suite.cases, results):
            statuses, initial, final = oracle_run_case(case, by_name)
            assert [status_kind(s) for s in result.event_statuses] == statuses, case.name
            assert result.final_values == final, case.name
            assert result.initial_values == initial, case.name
            cases_compared += 1
    return cases_compared, contracts_generated

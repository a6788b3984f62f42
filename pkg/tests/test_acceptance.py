"""Acceptance criteria 1-8, one test each.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``) and
asserts the verdict.  The catalog sweep behind criteria 2 and 5 runs once
per session.
"""

import json

import pytest

from curvepoints.verify import (
    arcs_summary,
    auxiliary_suite,
    diophantine_suite,
    enumeration_suite,
    interpolation_suite,
    mean_value_suite,
    run_sweep,
    soundness_summary,
    squarefree_suite,
)

SEED = 42


@pytest.fixture(scope="module")
def sweep_cells():
    return run_sweep()


def report(result):
    print(result.line())
    assert result.passed, json.dumps(result.details, default=str)[:4000]


def test_criterion_1_enumeration_exactness():
    report(enumeration_suite(seed=SEED))


@pytest.mark.slow
def test_criterion_2_bound_soundness(sweep_cells):
    result = soundness_summary(sweep_cells)
    assert result.details["instances"] == 11 * 6 * 5
    report(result)


def test_criterion_3_interpolation():
    report(interpolation_suite(seed=SEED))


def test_criterion_4_mean_value():
    report(mean_value_suite(seed=SEED))


@pytest.mark.slow
def test_criterion_5_major_arcs(sweep_cells):
    report(arcs_summary(sweep_cells))


def test_criterion_6_auxiliary_inequalities():
    report(auxiliary_suite(seed=SEED))


def test_criterion_7_squarefree():
    result = squarefree_suite(seed=SEED)
    for row in result.details["error_table"]:
        print(f"  x={row['x']} y={row['y']} count={row['count']} |count - y/zeta(2)|={row['abs_error']:.4f}")
    report(result)


def test_criterion_8_diophantine():
    result = diophantine_suite()
    assert result.details["worked_example"] == 4
    report(result)

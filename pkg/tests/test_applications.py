import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvepoints.applications import (
    ApplicationError,
    count_diophantine_brute,
    count_rational_near_curve,
    count_squarefree_exact,
    cross_path_check,
    diophantine_report,
    diophantine_solutions,
    dyadic_points,
    near_curve_points,
    squarefree_estimate,
    zeta2,
)
from curvepoints.oracles import count_squarefree_trial, diophantine_triple_loop, on_curve_triples


@pytest.mark.parametrize("x,y,expected", [(100, 16, 12), (48, 2, 0), (0, 1, 1)])
def test_squarefree_examples(x, y, expected):
    assert count_squarefree_exact(x, y) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**7), st.integers(1, 400))
def test_squarefree_matches_trial_division(x, y):
    assert count_squarefree_exact(x, y) == count_squarefree_trial(x + 1, x + y)


def test_squarefree_rejects_bad_ranges():
    for x, y in ((-1, 5), (5, 0), (10**19, 5)):
        with pytest.raises(ApplicationError):
            count_squarefree_exact(x, y)


def test_zeta2_main_term():
    assert float(16 / zeta2()) == pytest.approx(16 * 6 / math.pi**2)
    assert float(16 / zeta2()) == pytest.approx(9.72683, abs=1e-5)


def test_dyadic_points():
    assert dyadic_points(4, 64) == [8, 16, 32, 64]
    assert dyadic_points(4, 64, strict_lo=False) == [4, 8, 16, 32, 64]
    assert dyadic_points(0, 3) == []


def test_squarefree_estimate():
    x, y = 10**6, 64
    A, B = Fraction(math.ceil(2 * x ** (2 / 9))), 100
    rep = squarefree_estimate(x, y, A, B)
    assert rep.count == count_squarefree_trial(x + 1, x + y) == 40
    assert rep.main_term == pytest.approx(64 * 6 / math.pi**2)
    assert rep.R1 == 5 and rep.R1_N == 64
    assert rep.R2 == 3 and rep.R2_N == 64
    assert rep.R1 == max(rep.R1_table.values()) and rep.R2 == max(rep.R2_table.values())
    narrower = squarefree_estimate(x, y, A, 64)
    assert max(narrower.R1_table.values(), default=0) <= rep.R1
    with pytest.raises(ApplicationError):
        squarefree_estimate(x, y, B, B)
    with pytest.raises(ApplicationError):
        squarefree_estimate(x, 8, A, B)


def test_diophantine_worked_example():
    sols = diophantine_solutions(2, 1, 1, Fraction(1, 2), 10)
    assert sols == [(5, 3, 4), (5, 4, 3), (10, 6, 8), (10, 8, 6)]
    assert count_diophantine_brute(2, 1, 1, Fraction(1, 2), 10) == 4
    assert diophantine_triple_loop(2, 1, 1, Fraction(1, 2), 10) == 4
    assert count_diophantine_brute(2, 1, 1, Fraction(1, 2), 1) == 0
    assert count_diophantine_brute(2, 1, 1, 10**6, 7) == 7**3
    with pytest.raises(ApplicationError):
        count_diophantine_brute(2, 1, 1, 1, 1001)
    with pytest.raises(ApplicationError):
        count_diophantine_brute(1, 1, 1, 1, 10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.fractions(Fraction(1, 3), 3, max_denominator=4),
       st.fractions(Fraction(1, 3), 3, max_denominator=4), st.fractions(Fraction(1, 10), 20, max_denominator=10),
       st.integers(1, 14))
def test_brute_matches_triple_loop(k, a2, a3, theta, P):
    assert count_diophantine_brute(k, a2, a3, theta, P) == diophantine_triple_loop(k, a2, a3, theta, P)


def test_near_curve_on_circle():
    pts = near_curve_points(2, 1, 1, 0, 5)
    assert set(pts) == on_curve_triples(2, 1, 1, 5)
    assert (5, 3, 4) in pts and (5, 4, 3) in pts
    assert count_rational_near_curve(2, 1, 1, 0, 5) == 12
    with pytest.raises(ApplicationError):
        count_rational_near_curve(2, 1, 1, -1, 5)


def test_near_curve_monotone_in_delta():
    base = set(near_curve_points(3, 2, 1, Fraction(1, 100), 20))
    assert base <= set(near_curve_points(3, 2, 1, Fraction(1, 10), 20))


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("alphas", [(1, 1), (2, 1), (1, 3)])
@pytest.mark.parametrize("theta", [Fraction(1, 2), Fraction(1)])
def test_cross_path_agreement(k, alphas, theta):
    res = cross_path_check(k, *alphas, theta, 25)
    assert res.agree, res.missing


def test_report_per_q():
    rep = diophantine_report(2, 1, 1, Fraction(1, 2), 10)
    assert rep.brute == 4 and rep.delta == Fraction(1, 20)
    assert rep.per_q[5][0] == 2 and rep.per_q[10][0] == 2
    assert rep.per_q[5][1] >= 2
    assert rep.to_json()["per_q"]["5"]["brute_in_box"] == 2

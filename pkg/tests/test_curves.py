from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from curvepoints.catalog import load_catalog, parse_catalog, parse_curve, resolve_curve
from curvepoints.curves import (
    CertificateError,
    CurveError,
    certify_bounds,
    is_half_integer,
    monomial,
    nearest_integer_distance,
    sine_perturbed,
    sqrt_reciprocal,
)


def test_polynomial_values_are_exact():
    sq = monomial([(1, 2)], 4)
    assert sq.evaluate(0, 6) == 36
    assert sq.evaluate(2, 7) == 2
    assert sq.exact_value(7) == 49


def test_sqrt_reciprocal_derivative_matches_symbolic():
    x = sympy.symbols("x")
    expr = sympy.diff(sympy.sqrt(sympy.Integer(10**6) / x), x)
    expected = sympy.N(expr.subs(x, 100), 60)
    got = sqrt_reciprocal(10**6, 64).evaluate(1, 100)
    with mp.workprec(200):
        assert abs(got - mpf(str(expected))) <= abs(got) * mpf("1e-20")
    assert float(got) == -0.5


@pytest.mark.parametrize("name", [c.name for c in load_catalog()])
def test_evaluation_stable_across_precisions(name):
    curve = resolve_curve(name, 300)
    for order in (0, 1, 3):
        for x in (300, 451, 600):
            lo = curve.evaluate(order, x, 128)
            hi = curve.evaluate(order, x, 192)
            with mp.workprec(256):
                assert abs(lo - hi) <= abs(hi) * mpf(2) ** -127


def test_evaluate_rejects_bad_input():
    c = monomial([(1, 2)], 8)
    with pytest.raises(CurveError):
        c.evaluate(0, 7)
    with pytest.raises(CurveError):
        c.evaluate(0, 17)
    with pytest.raises(CurveError):
        c.evaluate(9, 10)
    with pytest.raises(CurveError):
        c.evaluate(0, 10, precision=32)
    with pytest.raises(CurveError):
        monomial([(1, 2)], 3)


def test_certificate_constant_third_derivative():
    cert = certify_bounds(monomial([(Fraction(1, 6), 3)], 8), 3)
    assert cert.certified
    assert cert.lambda_k == 1 and cert.c_k == 1


def test_certificate_sqrt_second_derivative():
    cert = certify_bounds(monomial([(1, Fraction(1, 2))], 100), 2)
    with mp.workprec(200):
        lam = mpf(200) ** mpf(-1.5) / 4
        assert abs(cert.lambda_k - lam) < lam * mpf(2) ** -120
        assert abs(cert.c_k - mp.sqrt(8)) < mpf(2) ** -120
    assert cert.certified and cert.sign == -1


def test_certificate_rejects_vanishing_derivative():
    wavy = sine_perturbed(None, 1, Fraction(1, 10), 100)
    with pytest.raises(CertificateError):
        certify_bounds(wavy, 2)
    with pytest.raises(CertificateError):
        certify_bounds(monomial([(1, 2)], 10), 3)


def test_sampled_certificate_is_marked():
    wavy = resolve_curve("wavy-sqrt", 1000)
    cert = certify_bounds(wavy, 1)
    assert not cert.certified


@pytest.mark.parametrize("name", [c.name for c in load_catalog()])
def test_certificates_hold_on_dense_samples(name):
    curve = resolve_curve(name, 512)
    xs = np.linspace(curve.lo, curve.hi, 10_000)
    for k in range(1, 6):
        try:
            cert = certify_bounds(curve, k)
        except CertificateError:
            continue
        mags = np.abs(curve.evaluate_array(k, xs))
        lam, top = float(cert.lambda_k), float(cert.upper)
        assert np.all(mags >= lam * (1 - 1e-12))
        assert np.all(mags <= top * (1 + 1e-12))
        assert cert.c_k >= 1


@pytest.mark.parametrize("value,expected", [
    (Fraction(16, 5), (3, Fraction(1, 5))),
    (Fraction(7), (7, 0)),
    (Fraction(5, 2), (2, Fraction(1, 2))),
    (Fraction(7, 2), (4, Fraction(1, 2))),
    (Fraction(-5, 2), (-2, Fraction(1, 2))),
])
def test_nearest_integer_examples(value, expected):
    assert nearest_integer_distance(value) == expected


def test_nearest_integer_mpf_half_to_even():
    with mp.workprec(128):
        m, d = nearest_integer_distance(mpf("2.5"))
    assert m == 2 and d == 0.5
    assert is_half_integer(mpf("2.5")) and not is_half_integer(mpf(3))


@given(st.fractions(min_value=-10**6, max_value=10**6))
def test_nearest_integer_minimizes(v):
    m, d = nearest_integer_distance(v)
    assert 0 <= d <= Fraction(1, 2)
    assert d == abs(v - m)
    assert d <= abs(v - (m - 1)) and d <= abs(v - (m + 1))


@settings(max_examples=50)
@given(st.floats(min_value=-1e9, max_value=1e9, allow_nan=False))
def test_nearest_integer_mpf_agrees_with_fraction(v):
    with mp.workprec(128):
        m1, d1 = nearest_integer_distance(mpf(v))
    m2, d2 = nearest_integer_distance(Fraction(v))
    assert m1 == m2 and float(d1) == float(d2)


def test_record_round_trip():
    for curve in load_catalog():
        again = parse_curve(curve.record())
        assert again == curve


def test_catalog_rejects_bad_records():
    for bad in ("nosuch terms=1@1 N=5", "monomial terms=1 N=5", "monomial terms=1@1 N=x",
                "monomial terms=1@1 bogus=2 N=5", "monomial terms=1@1"):
        with pytest.raises(CurveError):
            parse_curve(bad)
    with pytest.raises(CurveError):
        parse_catalog("a: monomial terms=1@1 N=5\na: monomial terms=1@2 N=5\n")


def test_inline_record_and_override():
    c = resolve_curve("monomial terms=1@1/2", 100)
    assert c.N == 100 and c.exact_value(100) is None
    assert resolve_curve("sqrt", 400).N == 400

from fractions import Fraction

import pytest
from mpmath import mp

from curvepoints.catalog import resolve_curve
from curvepoints.curves import certify_bounds, monomial
from curvepoints.enumeration import enumerate_close_points
from curvepoints.interpolation import RationalPolynomial
from curvepoints.majorarcs import (
    ArcError,
    ArcFinding,
    ComponentSet,
    MajorArc,
    ProperMajorArc,
    analyze_arcs,
    arc_constants,
    arc_decomposition,
    connected_components,
    detect_major_arcs,
    extract_proper_arc,
    lemma7_report,
    major_arc_contribution_bound,
    proper_arcs_disjoint,
)
from curvepoints.oracles import exhaustive_arcs

HALF = Fraction(1, 2)
TRIANGLE = RationalPolynomial((0, -HALF, HALF))


def triangle_curve(N=64):
    return monomial([(HALF, 2), (-HALF, 1)], N)


def test_integer_quadratic_is_one_arc():
    c = triangle_curve()
    close = enumerate_close_points(c, Fraction(1, 10))
    arcs = detect_major_arcs(close, c, 3)
    assert len(arcs) == 1
    arc = arcs[0]
    assert arc.poly == TRIANGLE and arc.q == 2
    assert list(arc.members) == close.members == list(range(64, 129))


def test_small_or_empty_sets_have_no_arcs():
    c = monomial([(1, 1)], 10, shift=HALF)
    close = enumerate_close_points(c, Fraction(1, 4) - Fraction(1, 10**6))
    assert detect_major_arcs(close, c, 3) == []
    with pytest.raises(ArcError):
        detect_major_arcs(close, c, 2)


@pytest.mark.parametrize("name,N,delta", [
    ("sqrt", 10**4, Fraction(1, 500)),
    ("three-halves", 1000, Fraction(1, 50)),
    ("slow-cubic", 512, Fraction(1, 20)),
    ("half-triangle", 64, Fraction(1, 10)),
    ("cube-root", 2048, Fraction(1, 50)),
])
def test_detection_matches_exhaustive_oracle(name, N, delta):
    c = resolve_curve(name, N)
    close = enumerate_close_points(c, delta)
    assert len(close) <= 120
    got = {(a.members, a.poly.coeffs) for a in detect_major_arcs(close, c, 3)}
    assert got == exhaustive_arcs(close, 3)


def test_components_trivial_cases():
    c = triangle_curve()
    whole = connected_components(c, TRIANGLE, Fraction(1, 10))
    assert whole.intervals == ((64.0, 128.0),)
    shifted = TRIANGLE + RationalPolynomial.constant(1)
    assert len(connected_components(c, shifted, Fraction(1, 10))) == 0
    with pytest.raises(ArcError):
        connected_components(c, TRIANGLE, Fraction(1, 10), resolution=11)


def test_components_of_a_crossing():
    # f(x) = x^2/1000 against P = 0 on [8, 16]: |f| < 0.1 for x < 10
    c = monomial([(Fraction(1, 1000), 2)], 8)
    cs = connected_components(c, RationalPolynomial(), Fraction(1, 10))
    assert len(cs) == 1
    a, b = cs.intervals[0]
    assert a == 8 and b == pytest.approx(10, abs=1e-9)
    assert cs.locate(9.5) == 0 and cs.locate(12) is None


def _arc(members):
    return MajorArc(tuple(members), tuple(0 for _ in members), RationalPolynomial(), 1, 0)


def test_extraction_picks_largest_then_leftmost():
    cs = ComponentSet(((0.0, 10.0), (20.0, 30.0)), 1e-9, 16)
    big_right = extract_proper_arc(_arc([1, 2, 3, 21, 22, 23, 24, 25]), cs)
    assert big_right.members == (21, 22, 23, 24, 25) and big_right.L == 4
    tie = extract_proper_arc(_arc([1, 2, 3, 21, 22, 23]), cs)
    assert tie.members == (1, 2, 3)
    with pytest.raises(ArcFinding):
        extract_proper_arc(_arc([15, 16]), cs)


def test_arc_constants():
    with mp.workprec(128):
        a3, b3 = arc_constants(3, 1)
        assert abs(a3 - 864 * mp.e**7) < mp.mpf(2) ** -100
        assert abs(b3 - 180 * mp.e**3) < mp.mpf(2) ** -100
        assert arc_constants(5, 7)[0] >= 72 * mp.e
    assert float(a3) == pytest.approx(947491.05, abs=0.01)
    assert float(b3) == pytest.approx(3615.40, abs=0.01)
    with pytest.raises(ArcError):
        arc_constants(2, 1)
    with pytest.raises(ArcError):
        arc_constants(3, 0.5)


def test_contribution_bound_branches():
    from curvepoints.curves import DerivativeCertificate
    cert = DerivativeCertificate(3, mp.mpf("1e-6"), mp.mpf(1), True)
    one = major_arc_contribution_bound(1000, Fraction(1, 1000), 3, cert, 1)
    two = major_arc_contribution_bound(1000, Fraction(1, 1000), 3, cert, 2)
    with mp.workprec(128):
        expected = (180 * mp.e**3 * 1000 * mp.mpf("0.001") ** (mp.mpf(1) / 3)
                    + 8 * 27 * (mp.mpf("0.001") / mp.mpf("1e-6")) ** (mp.mpf(1) / 3) + 90 * mp.e**3)
    assert one == pytest.approx(float(expected), rel=1e-14)
    assert two >= one


def test_lemma7_on_integer_quadratic():
    c = triangle_curve()
    close = enumerate_close_points(c, Fraction(1, 10))
    arc = detect_major_arcs(close, c, 3)[0]
    cs = connected_components(c, arc.poly, close.delta)
    proper = extract_proper_arc(arc, cs)
    rep = lemma7_report(proper, arc, close, 3, None, close.delta)
    assert rep.part2.lhs == 65
    assert rep.part2.rhs == pytest.approx(6 * 64 * 2 ** (-1 / 3))
    assert rep.passed


def test_lemma7_degenerate_proper_arc():
    arc = _arc([5, 6, 7, 8])
    proper = ProperMajorArc(0, (5,), (5.0, 5.0), 1, RationalPolynomial())
    close = enumerate_close_points(triangle_curve(), Fraction(1, 10))
    assert lemma7_report(proper, arc, close, 3, None, Fraction(1, 10)).passed


def test_decomposition_trivial_cases():
    c = resolve_curve("sqrt", 100)
    close = enumerate_close_points(c, Fraction(1, 20))
    empty = arc_decomposition(close, [])
    assert empty.S0 == [] and empty.T0 == close.members and empty.certificate
    c2 = triangle_curve()
    close2 = enumerate_close_points(c2, Fraction(1, 10))
    arcs = detect_major_arcs(close2, c2, 3)
    single = arc_decomposition(close2, arcs)
    assert single.S0 == list(arcs[0].members) and single.T0 == []


@pytest.mark.parametrize("N,delta", [(10**4, Fraction(1, 100)), (4096, Fraction(1, 20)), (2048, Fraction(1, 5))])
def test_sqrt_arc_analysis(N, delta):
    c = resolve_curve("sqrt", N)
    close = enumerate_close_points(c, delta)
    c3 = certify_bounds(c, 3)
    res = analyze_arcs(c, close, 3, c3)
    assert res.arcs
    assert all(len(cs) <= 3 for cs in res.components)
    assert all(rep.passed for rep in res.lemma7)
    d = res.decomposition
    assert sorted(d.S0 + d.T0) == close.members and not set(d.S0) & set(d.T0)
    assert len(d.S0) <= major_arc_contribution_bound(N, delta, 3, c3, 2)
    json_form = res.to_json()
    assert json_form["S0"] + json_form["T0"] == len(close)


def test_proper_arcs_disjoint():
    p = lambda a, b: ProperMajorArc(0, (a, b), (a, b), 1, RationalPolynomial())  # noqa: E731
    assert proper_arcs_disjoint([p(1, 5), p(6, 9)])
    assert not proper_arcs_disjoint([p(1, 5), p(5, 9)])
    assert proper_arcs_disjoint([])

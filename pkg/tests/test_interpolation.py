import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvepoints.interpolation import (
    InterpolationError,
    NodeSet,
    RationalPolynomial,
    denominator,
    determinant_divided_difference,
    divided_difference,
    lagrange_interpolate,
    newton_interpolate,
)

X = RationalPolynomial((0, 1))


def test_collinear_nodes_collapse_to_degree_one():
    P = lagrange_interpolate([(i, i) for i in range(1, 5)])
    assert P == X and P.degree == 1


def test_single_node_is_constant():
    assert lagrange_interpolate([(5, 7)]) == RationalPolynomial.constant(7)


def test_three_nodes_give_square():
    assert lagrange_interpolate([(0, 0), (1, 1), (2, 4)]) == X * X


def test_duplicate_abscissa_rejected():
    with pytest.raises(InterpolationError):
        lagrange_interpolate([(1, 2), (1, 3)])
    with pytest.raises(InterpolationError):
        divided_difference([(0, 0), (0, 1)])
    with pytest.raises(InterpolationError):
        lagrange_interpolate([])


def test_divided_difference_examples():
    assert divided_difference([(3, 27), (5, 125), (8, 512), (-2, -8)]) == 1
    assert divided_difference([(2, 7), (5, 1)]) == Fraction(1 - 7, 5 - 2)
    with pytest.raises(InterpolationError):
        divided_difference([(1, 1)])


def test_denominators():
    assert denominator(X.scale(Fraction(1, 2))) == 2
    assert denominator(RationalPolynomial((3, -4, 7))) == 1
    P = lagrange_interpolate([(0, 0), (1, 0), (2, 1)])
    assert P == RationalPolynomial((0, Fraction(-1, 2), Fraction(1, 2)))
    assert denominator(P) == 2
    assert denominator(RationalPolynomial()) == 1


def test_exp_divided_difference_mean_value():
    from mpmath import mp, mpf
    from curvepoints.curves import mpf_to_fraction
    with mp.workprec(256):
        nodes = [(i, mpf_to_fraction(mp.exp(mpf(i)))) for i in range(4)]
    b3 = divided_difference(nodes)
    assert math.e**0 <= 6 * b3 <= math.e**3


def test_polynomial_arithmetic_and_json():
    P = RationalPolynomial((Fraction(1, 3), 0, 2))
    Q = RationalPolynomial.from_json(P.to_json())
    assert P == Q and P.to_json() == ["1/3", "0", "2"]
    assert (P - P).degree == -1
    assert (P * X)(3) == 3 * P(3)
    shifted = P.taylor_shift(Fraction(5, 2))
    assert shifted(Fraction(1, 7)) == P(Fraction(5, 2) + Fraction(1, 7))


nodesets = st.integers(min_value=1, max_value=12).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(-100, 100), min_size=n, max_size=n, unique=True),
        st.lists(st.fractions(min_value=-1000, max_value=1000, max_denominator=60), min_size=n, max_size=n),
    )
)


@settings(max_examples=150, deadline=None)
@given(nodesets)
def test_interpolation_exact_and_unique(data):
    xs, ys = data
    nodes = NodeSet.from_pairs(zip(xs, ys))
    P = lagrange_interpolate(nodes)
    assert all(P(x) == y for x, y in zip(xs, ys))
    assert P.degree <= len(xs) - 1
    assert P.coeffs == newton_interpolate(nodes).coeffs
    if len(xs) >= 2:
        b = divided_difference(nodes)
        assert b == determinant_divided_difference(nodes)
        if P.degree == len(xs) - 1:
            assert b == P.leading
        else:
            assert b == 0

"""Independent reference computations used by the verification suite.

Each oracle takes a different route from the code it checks: values through
``mp.power`` with a real exponent instead of the root-based evaluator,
arcs by exhaustive subrange fitting in Newton form instead of windowed
Lagrange fits, squarefreeness by trial division instead of sieving, and
Diophantine counts by a plain triple loop.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Set, Tuple

import numpy as np
from mpmath import mp, mpf

from .curves import Curve, DifferenceCurve, MonomialCurve, SineCurve, as_fraction
from .enumeration import CloseSet
from .interpolation import newton_interpolate

ORACLE_PRECISION = 256


def _mp(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def oracle_exact(curve: Curve, n: int) -> Optional[Fraction]:
    """f(n) as a rational when every term has an integral exponent."""
    if isinstance(curve, MonomialCurve):
        if all(t.base_exp == 1 and t.exponent.denominator == 1 for t in curve.terms):
            return sum((t.base * Fraction(n) ** t.exponent.numerator for t in curve.terms), Fraction(0))
    elif isinstance(curve, DifferenceCurve):
        a, b = oracle_exact(curve.parent, n + curve.step), oracle_exact(curve.parent, n)
        if a is not None and b is not None:
            return a - b
    return None


def oracle_value(curve: Curve, n, precision: int = ORACLE_PRECISION) -> mpf:
    """f(n) straight from the curve's defining parameters."""
    with mp.workprec(precision):
        x = mpf(n)
        if isinstance(curve, MonomialCurve):
            return sum(mp.power(_mp(t.base), _mp(t.base_exp)) * mp.power(x, _mp(t.exponent))
                       for t in curve.terms)
        if isinstance(curve, SineCurve):
            base = oracle_value(curve.base, n, precision) if curve.base is not None else mpf(0)
            return base + _mp(curve.amplitude) * mp.sin(_mp(curve.frequency) * x + _mp(curve.phase))
        if isinstance(curve, DifferenceCurve):
            return oracle_value(curve.parent, n + curve.step, precision) - oracle_value(curve.parent, n, precision)
    raise TypeError(f"no oracle for {type(curve).__name__}")


def naive_close_points(curve: Curve, delta, precision: int = ORACLE_PRECISION) -> List[int]:
    """Members of S(f, N, delta): a double-precision pass picks candidates,
    each of which is then decided at ``precision`` bits."""
    delta = as_fraction(delta)
    ns = np.arange(curve.lo, curve.hi + 1)
    values = curve.evaluate_array(0, ns.astype(float))
    dist = np.abs(values - np.round(values))
    slack = 1e-6 * (1 + np.abs(values))
    candidates = ns[dist < float(delta) + slack]
    out = []
    with mp.workprec(precision):
        d = _mp(delta)
        for n in candidates:
            exact = oracle_exact(curve, int(n))
            if exact is not None:
                if abs(exact - round(exact)) < delta:
                    out.append(int(n))
                continue
            v = oracle_value(curve, int(n), precision)
            if abs(v - mp.nint(v)) < d:
                out.append(int(n))
    return out


def exhaustive_arcs(close: CloseSet, k: int) -> Set[Tuple[Tuple[int, ...], Tuple[Fraction, ...]]]:
    """Every maximal run of >= k+1 consecutive members fitting one degree < k
    polynomial, found by testing all subranges."""
    pts = [(p.n, p.m) for p in close.points]
    M = len(pts)

    def fits(s: int, e: int):
        P = newton_interpolate(pts[s:s + k])
        return P if all(P(n) == m for n, m in pts[s:e + 1]) else None

    found = set()
    for s in range(M):
        for e in range(s + k, M):
            P = fits(s, e)
            if P is None:
                continue
            left = s > 0 and fits(s - 1, e) is not None
            right = e + 1 < M and fits(s, e + 1) is not None
            if not left and not right:
                found.add((tuple(n for n, _ in pts[s:e + 1]), P.coeffs))
    return found


def is_squarefree_trial(n: int) -> bool:
    if n < 1:
        raise ValueError("n must be positive")
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return False
        d += 1
    return True


def count_squarefree_trial(lo: int, hi: int) -> int:
    """Squarefree integers in [lo, hi] by per-integer trial division."""
    return sum(1 for n in range(lo, hi + 1) if is_squarefree_trial(n))


def diophantine_triple_loop(k: int, alpha2, alpha3, theta, P: int) -> int:
    a2, a3, th = as_fraction(alpha2), as_fraction(alpha3), as_fraction(theta)
    return sum(1 for x1 in range(1, P + 1) for x2 in range(1, P + 1) for x3 in range(1, P + 1)
               if abs(x1**k - a2 * x2**k - a3 * x3**k) < th)


def on_curve_triples(k: int, alpha2, alpha3, P: int) -> Set[Tuple[int, int, int]]:
    """(q, p2, p3) with 0 <= p2, p3 <= q <= P and (p2/q, p3/q) exactly on the curve."""
    a2, a3 = as_fraction(alpha2), as_fraction(alpha3)
    return {(q, p2, p3) for q in range(1, P + 1) for p2 in range(q + 1) for p3 in range(q + 1)
            if a2 * p2**k + a3 * p3**k == q**k}

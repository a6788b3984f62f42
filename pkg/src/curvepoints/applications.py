"""Squarefree integers in short intervals and ternary Diophantine inequalities."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, isqrt, lcm
from typing import Dict, List, Optional, Tuple

import numpy as np
from mpmath import mp

from .curves import DEFAULT_PRECISION, as_fraction, mpf_to_fraction, reciprocal_square, sqrt_reciprocal, to_mpf
from .enumeration import enumerate_close_points

MAX_SIEVE = 2**62
MAX_BRUTE_P = 1000


class ApplicationError(ValueError):
    pass


# --------------------------------------------------------------------------
# squarefree numbers


def zeta2(precision: int = DEFAULT_PRECISION):
    with mp.workprec(precision):
        return mp.pi**2 / 6


def _interval(x, y) -> Tuple[int, int]:
    x, y = as_fraction(x), as_fraction(y)
    if x < 0 or y <= 0:
        raise ApplicationError("need x >= 0 and y > 0")
    lo, hi = floor(x) + 1, floor(x + y)
    if hi >= MAX_SIEVE:
        raise ApplicationError(f"x + y exceeds the supported range {MAX_SIEVE}")
    return lo, hi


def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def squarefree_mask(lo: int, hi: int) -> np.ndarray:
    """Boolean array over lo..hi marking squarefree integers."""
    if hi < lo:
        return np.zeros(0, dtype=bool)
    mask = np.ones(hi - lo + 1, dtype=bool)
    for p in _primes_upto(isqrt(hi)):
        sq = int(p) * int(p)
        start = -(-lo // sq) * sq
        mask[start - lo::sq] = False
    return mask


def count_squarefree_exact(x, y) -> int:
    """Number of squarefree n in (x, x + y], by sieving with p^2 <= x + y."""
    lo, hi = _interval(x, y)
    return int(squarefree_mask(lo, hi).sum())


@dataclass
class SquarefreeReport:
    x: Fraction
    y: Fraction
    A: Fraction
    B: Fraction
    count: int
    main_term: float
    R1: int
    R1_N: Optional[int]
    R2: int
    R2_N: Optional[int]
    R1_table: Dict[int, int] = field(default_factory=dict)
    R2_table: Dict[int, int] = field(default_factory=dict)

    @property
    def error(self) -> float:
        return self.count - self.main_term

    def to_json(self) -> dict:
        return {
            "x": str(self.x), "y": str(self.y), "A": str(self.A), "B": str(self.B),
            "count": self.count, "main_term": self.main_term, "error": self.error,
            "R1": self.R1, "R1_N": self.R1_N, "R2": self.R2, "R2_N": self.R2_N,
            "R1_table": {str(k): v for k, v in self.R1_table.items()},
            "R2_table": {str(k): v for k, v in self.R2_table.items()},
        }


def dyadic_points(lo, hi, strict_lo: bool = True, minimum: int = 4) -> List[int]:
    """Powers of two N >= minimum with lo < N <= hi (lo <= N when not strict)."""
    out, N = [], minimum
    while N <= hi:
        if N > lo or (not strict_lo and N == lo):
            out.append(N)
        N *= 2
    return out


def squarefree_estimate(x, y, A, B, precision: int = DEFAULT_PRECISION) -> SquarefreeReport:
    """Exact count, main term y/zeta(2), and the two near-curve maxima.

    R1 = max over dyadic N in (A, B] of R(x/n^2, N, y/N^2) and
    R2 = max over dyadic N <= 2x/B^2 of R(sqrt(x/n), N, y/sqrt(N x)).
    """
    x, y, A, B = (as_fraction(v) for v in (x, y, A, B))
    with mp.workprec(precision):
        sx = mp.sqrt(to_mpf(x))
        if not (16 <= y and to_mpf(y) < sx / 4):
            raise ApplicationError("need 16 <= y < sqrt(x)/4")
        if not (2 * mp.sqrt(to_mpf(y)) <= to_mpf(A) and A < B and to_mpf(B) <= 2 * sx):
            raise ApplicationError("need 2 sqrt(y) <= A < B <= 2 sqrt(x)")
        main = float(to_mpf(y) / zeta2(precision))
    count = count_squarefree_exact(x, y)

    r1: Dict[int, int] = {}
    for N in dyadic_points(A, B):
        curve = reciprocal_square(x, N, name="x/n^2")
        r1[N] = len(enumerate_close_points(curve, y / (N * N), precision, force=True))
    r2: Dict[int, int] = {}
    for N in dyadic_points(0, 2 * x / (B * B)):
        curve = sqrt_reciprocal(x, N, name="sqrt(x/n)")
        with mp.workprec(precision):
            delta = mpf_to_fraction(to_mpf(y) / mp.sqrt(N * to_mpf(x)))
        r2[N] = len(enumerate_close_points(curve, delta, precision, force=True))

    def best(table):
        if not table:
            return 0, None
        N = max(sorted(table), key=lambda n: table[n])
        return table[N], N

    R1, N1 = best(r1)
    R2, N2 = best(r2)
    return SquarefreeReport(x, y, A, B, count, main, R1, N1, R2, N2, r1, r2)


# --------------------------------------------------------------------------
# Diophantine inequality |x1^k - a2 x2^k - a3 x3^k| < theta


@dataclass
class DiophantineReport:
    k: int
    alpha2: Fraction
    alpha3: Fraction
    theta: Fraction
    P: int
    brute: int
    delta: Fraction
    near_curve: int
    per_q: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "k": self.k, "alpha2": str(self.alpha2), "alpha3": str(self.alpha3),
            "theta": str(self.theta), "P": self.P, "delta": str(self.delta),
            "brute": self.brute, "near_curve": self.near_curve,
            "per_q": {str(q): {"brute_in_box": b, "near_curve": c} for q, (b, c) in sorted(self.per_q.items())},
        }


def _check_dioph(k, alpha2, alpha3, theta):
    if k < 2:
        raise ApplicationError("k must be at least 2")
    a2, a3, th = as_fraction(alpha2), as_fraction(alpha3), as_fraction(theta)
    if a2 <= 0 or a3 <= 0 or th <= 0:
        raise ApplicationError("alpha2, alpha3 and theta must be positive")
    return a2, a3, th


def diophantine_solutions(k: int, alpha2, alpha3, theta, P: int) -> List[Tuple[int, int, int]]:
    """All 1 <= x1, x2, x3 <= P with |x1^k - a2 x2^k - a3 x3^k| < theta, exactly.

    After clearing denominators the inequality reads |D x1^k - V| < D theta
    with V = A2 x2^k + A3 x3^k an integer; every (x2, x3) value is tabulated
    once and each x1 looks up its admissible window.
    """
    a2, a3, th = _check_dioph(k, alpha2, alpha3, theta)
    if not 1 <= P <= MAX_BRUTE_P:
        raise ApplicationError(f"P must lie in [1, {MAX_BRUTE_P}]")
    D = lcm(a2.denominator, a3.denominator)
    A2, A3 = int(a2 * D), int(a3 * D)
    powers = [n**k for n in range(P + 1)]
    table = sorted((A2 * powers[x2] + A3 * powers[x3], x2, x3)
                   for x2 in range(1, P + 1) for x3 in range(1, P + 1))
    values = [v for v, _, _ in table]
    out = []
    Dth = D * th
    for x1 in range(1, P + 1):
        target = D * powers[x1]
        lo = floor(target - Dth) + 1       # V > target - D theta
        hi = ceil(target + Dth) - 1        # V < target + D theta
        for idx in range(bisect_left(values, lo), bisect_right(values, hi)):
            _, x2, x3 = table[idx]
            out.append((x1, x2, x3))
    return sorted(out)


def count_diophantine_brute(k: int, alpha2, alpha3, theta, P: int) -> int:
    return len(diophantine_solutions(k, alpha2, alpha3, theta, P))


def near_curve_points(k: int, alpha2, alpha3, delta, P: int) -> List[Tuple[int, int, int]]:
    """Triples (q, p2, p3), 1 <= q <= P and 0 <= p2, p3 <= q, with p3/q within
    delta/q of the curve 1 = a2 y2^k + a3 y3^k measured vertically.

    Writing t = ((q^k - a2 p2^k)/a3)^(1/k) for q times the curve height over
    p2/q, the condition is |p3 - t| <= delta; it is decided exactly by
    comparing k-th powers.  Columns with q^k < a2 p2^k have no curve point.
    """
    a2, a3 = as_fraction(alpha2), as_fraction(alpha3)
    if a2 <= 0 or a3 <= 0:
        raise ApplicationError("alpha2 and alpha3 must be positive")
    d = as_fraction(delta)
    if d < 0:
        raise ApplicationError("delta must be non-negative")
    out = []
    for q in range(1, P + 1):
        qk = q**k
        for p2 in range(q + 1):
            rest = qk - a2 * p2**k
            if rest < 0:
                continue
            tk = rest / a3  # t^k
            # integer root estimate, then scan the few candidates around it
            guess = int(round(float(tk) ** (1.0 / k))) if tk > 0 else 0
            span = int(d) + 2
            for p3 in range(max(0, guess - span), min(q, guess + span) + 1):
                low = p3 - d
                if (low <= 0 or low**k <= tk) and tk <= (p3 + d) ** k:
                    out.append((q, p2, p3))
    return out


def count_rational_near_curve(k: int, alpha2, alpha3, delta, P: int) -> int:
    return len(near_curve_points(k, alpha2, alpha3, delta, P))


def diophantine_report(k: int, alpha2, alpha3, theta, P: int) -> DiophantineReport:
    """Brute and near-curve counts at delta = theta / P^(k-1), tabulated per q.

    The per-q table pairs brute solutions with x1 = q lying in the box
    x2, x3 <= q against near-curve triples with that q.
    """
    a2, a3, th = _check_dioph(k, alpha2, alpha3, theta)
    sols = diophantine_solutions(k, a2, a3, th, P)
    delta = th / Fraction(P) ** (k - 1)
    near = near_curve_points(k, a2, a3, delta, P)
    per_q: Dict[int, List[int]] = {q: [0, 0] for q in range(1, P + 1)}
    for x1, x2, x3 in sols:
        if x2 <= x1 and x3 <= x1:
            per_q[x1][0] += 1
    for q, _, _ in near:
        per_q[q][1] += 1
    table = {q: (b, c) for q, (b, c) in per_q.items() if b or c}
    return DiophantineReport(k, a2, a3, th, P, len(sols), delta, len(near), table)


@dataclass
class CrossPathResult:
    contained: bool
    exact_match: bool
    missing: List[Tuple[int, int, int]]

    @property
    def agree(self) -> bool:
        return self.contained and self.exact_match


def cross_path_check(k: int, alpha2, alpha3, theta, P: int) -> CrossPathResult:
    """Compare the two counting paths.

    Every brute solution (x1, x2, x3) with x2, x3 <= x1 must appear as the
    near-curve triple (x1, x2, x3) at delta = theta/P^(k-1), and the brute
    solutions with zero residual must coincide with the near-curve triples
    at delta = 0 having p2, p3 >= 1.
    """
    a2, a3, th = _check_dioph(k, alpha2, alpha3, theta)
    sols = [s for s in diophantine_solutions(k, a2, a3, th, P) if s[1] <= s[0] and s[2] <= s[0]]
    near = set(near_curve_points(k, a2, a3, th / Fraction(P) ** (k - 1), P))
    missing = [s for s in sols if s not in near]
    exact_brute = {s for s in sols if s[0] ** k == a2 * s[1] ** k + a3 * s[2] ** k}
    exact_near = {t for t in near_curve_points(k, a2, a3, 0, P) if t[1] >= 1 and t[2] >= 1}
    return CrossPathResult(not missing, exact_brute == exact_near, missing)

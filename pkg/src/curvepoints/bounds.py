"""Explicit-constant upper bounds for R(f, N, delta) and auxiliary inequalities.

Each theorem-level function returns a :class:`BoundReport` listing its
hypothesis checks.  The bound itself is computed in mpmath and rounded
upward to a float, so a reported bound never understates the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp, mpf

from .curves import DerivativeCertificate, as_fraction, to_mpf

BOUND_PRECISION = 128


class BoundError(ValueError):
    pass


def round_up(value: mpf) -> float:
    """Smallest float >= value."""
    f = float(value)
    if mpf(f) < value:
        f = math.nextafter(f, math.inf)
    return f


def round_down(value: mpf) -> float:
    f = float(value)
    if mpf(f) > value:
        f = math.nextafter(f, -math.inf)
    return f


def _m(x) -> mpf:
    if isinstance(x, Fraction):
        return to_mpf(x)
    return mpf(x)


@dataclass
class Hypothesis:
    name: str
    condition: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "condition": self.condition, "passed": self.passed, "detail": self.detail}


@dataclass
class BoundReport:
    theorem: str
    hypotheses: List[Hypothesis]
    bound: Optional[float]
    count: Optional[int] = None
    advisory: bool = False
    params: dict = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return all(h.passed for h in self.hypotheses)

    @property
    def margin(self) -> Optional[float]:
        if self.bound is None or self.count is None:
            return None
        return self.bound - self.count

    def with_count(self, count: int) -> "BoundReport":
        self.count = count
        return self

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": self.params,
            "hypotheses": [h.to_json() for h in self.hypotheses],
            "bound": self.bound,
            "count": self.count,
            "margin": self.margin,
            "advisory": self.advisory,
        }


def _cert_check(cert: DerivativeCertificate, order: int) -> Hypothesis:
    if cert.order != order:
        raise BoundError(f"certificate of order {cert.order} supplied where order {order} is needed")
    how = "endpoint-exact" if cert.certified else "sampled (advisory)"
    return Hypothesis(
        f"derivative bound k={order}",
        f"lambda_{order} <= |f^({order})| <= c_{order} lambda_{order}",
        True,
        f"lambda={float(cert.lambda_k):.6g}, c={float(cert.c_k):.6g}, {how}",
    )


def _finish(theorem, hyps, value_fn, cert, params) -> BoundReport:
    ok = all(h.passed for h in hyps)
    bound = None
    if ok:
        with mp.workprec(BOUND_PRECISION):
            bound = round_up(value_fn())
    return BoundReport(theorem, hyps, bound, advisory=not cert.certified, params=params)


def trivial_bound(N: int) -> int:
    """R(f, N, delta) <= N + 1: [N, 2N] holds N + 1 integers."""
    if N < 1:
        raise BoundError("N must be positive")
    return N + 1


def first_derivative_bound(N: int, delta, cert1: DerivativeCertificate) -> BoundReport:
    """2 c1 N l1 + 4 c1 N delta + 2 delta / l1 + 1."""
    delta = as_fraction(delta)
    if not 0 < delta < Fraction(1, 4):
        raise BoundError(f"delta={delta} outside (0, 1/4)")
    hyps = [_cert_check(cert1, 1), Hypothesis("delta range", "0 < delta < 1/4", True)]

    def value():
        lam, c, d, n = cert1.lambda_k, cert1.c_k, _m(delta), mpf(N)
        return 2 * c * n * lam + 4 * c * n * d + 2 * d / lam + 1

    return _finish("first-derivative", hyps, value, cert1, {"N": N, "delta": str(delta), "k": 1})


def second_derivative_bound(N: int, delta, cert2: DerivativeCertificate) -> BoundReport:
    """6 {(3 c2)^(1/3) N l2^(1/3) + (12 c2)^(1/2) N delta^(1/2) + 1}, needing N l2 >= 1/c2 and delta < 1/8."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise BoundError("delta must be positive")
    with mp.workprec(BOUND_PRECISION):
        lhs = N * cert2.lambda_k
        rhs = 1 / cert2.c_k
    hyps = [
        _cert_check(cert2, 2),
        Hypothesis("N lambda_2 >= 1/c_2", "N*lambda_2 >= c_2^-1", bool(lhs >= rhs),
                   f"{float(lhs):.6g} vs {float(rhs):.6g}"),
        Hypothesis("delta range", "0 < delta < 1/8", delta < Fraction(1, 8), f"delta={delta}"),
    ]

    def value():
        lam, c, d, n = cert2.lambda_k, cert2.c_k, _m(delta), mpf(N)
        return 6 * (mp.cbrt(3 * c) * n * mp.cbrt(lam) + mp.sqrt(12 * c) * n * mp.sqrt(d) + 1)

    return _finish("second-derivative", hyps, value, cert2, {"N": N, "delta": str(delta), "k": 2})


def kth_alpha(k: int, c) -> mpf:
    """2k (2 c_k)^(2/(k(k+1)))."""
    return 2 * k * (2 * _m(c)) ** (mpf(2) / (k * (k + 1)))


def kth_derivative_bound(N: int, delta, certk: DerivativeCertificate) -> BoundReport:
    """alpha_k N l_k^(2/(k(k+1))) + 4k, valid when (k+1)! delta < l_k."""
    k = certk.order
    if k < 1:
        raise BoundError("k must be at least 1")
    delta = as_fraction(delta)
    if delta <= 0:
        raise BoundError("delta must be positive")
    with mp.workprec(BOUND_PRECISION):
        lhs = math.factorial(k + 1) * _m(delta)
    hyps = [
        _cert_check(certk, k),
        Hypothesis("(k+1)! delta < lambda_k", f"{k + 1}! * delta < lambda_{k}", bool(lhs < certk.lambda_k),
                   f"{float(lhs):.6g} vs {float(certk.lambda_k):.6g}"),
    ]

    def value():
        return kth_alpha(k, certk.c_k) * N * certk.lambda_k ** (mpf(2) / (k * (k + 1))) + 4 * k

    return _finish(f"kth-derivative(k={k})", hyps, value, certk, {"N": N, "delta": str(delta), "k": k})


def huxley_sargos_constants(k: int, c, branch: int = 2) -> Tuple[mpf, mpf]:
    """(alpha_k, beta_k) for the chosen branch."""
    c = _m(c)
    e3 = mp.e**3
    alpha = 2 * k**2 * c ** (mpf(2) / (k * (k + 1)))
    if branch == 1:
        beta = 4 * k**2 * (5 * e3 * c ** (mpf(2) / (k * (k - 1))) + 1)
    elif branch == 2:
        beta = 30 * e3 * k**2 * c ** (mpf(2) / (k * (k - 1))) + 4 * k**2
    else:
        raise BoundError(f"branch must be 1 or 2, got {branch}")
    return alpha, beta


def huxley_sargos_bound(N: int, delta, certk: DerivativeCertificate, branch: int = 2,
                        disjoint: bool = False) -> BoundReport:
    """Bound without the (k+1)! delta < lambda_k restriction, k >= 3.

    Branch 1 needs ``disjoint=True``, i.e. a computed certificate that the
    covering intervals of the small-denominator proper arcs are disjoint.
    """
    k = certk.order
    if k < 3:
        raise BoundError("this bound needs k >= 3")
    delta = as_fraction(delta)
    if not 0 < delta < Fraction(1, 4):
        raise BoundError(f"delta={delta} outside (0, 1/4)")
    if branch == 1 and not disjoint:
        raise BoundError("branch 1 requested without a disjointness certificate")
    hyps = [_cert_check(certk, k), Hypothesis("delta range", "0 < delta < 1/4", True)]
    if branch == 1:
        hyps.append(Hypothesis("cover disjointness", "small-denominator arc covers pairwise disjoint", True,
                               "certified by arc decomposition"))

    def value():
        alpha, beta = huxley_sargos_constants(k, certk.c_k, branch)
        d = _m(delta)
        third = (8 if branch == 1 else 16) * k**3 * (d / certk.lambda_k) ** (mpf(1) / k)
        return (alpha * N * certk.lambda_k ** (mpf(2) / (k * (k + 1)))
                + beta * N * d ** (mpf(2) / (k * (k - 1)))
                + third + 2 * k**2 * (5 * mp.e**3 + 1))

    return _finish(f"huxley-sargos(k={k},branch={branch})", hyps, value, certk,
                   {"N": N, "delta": str(delta), "k": k, "branch": branch})


# --------------------------------------------------------------------------
# auxiliary inequalities


def _check_terms(A_terms, B_terms):
    if not A_terms or not B_terms:
        raise BoundError("both term lists must be non-empty")
    for coef, power in list(A_terms) + list(B_terms):
        if not (coef > 0 and power > 0):
            raise BoundError("all coefficients and exponents must be positive")


def srinivasan_rhs(A_terms: Sequence[Tuple[float, float]], B_terms: Sequence[Tuple[float, float]],
                   H1, H2) -> float:
    """(m+n) {sum_ij (A_i^b_j B_j^a_i)^(1/(a_i+b_j)) + sum A_i H1^a_i + sum B_j H2^-b_j}.

    ``A_terms`` are (A_i, a_i) for the increasing powers H^a_i and
    ``B_terms`` are (B_j, b_j) for the decreasing powers H^-b_j.
    The value is infinite when H2 = 0.
    """
    _check_terms(A_terms, B_terms)
    if not 0 <= H1 <= H2:
        raise BoundError("need 0 <= H1 <= H2")
    if H2 == 0:
        return math.inf
    with mp.workprec(BOUND_PRECISION):
        h1, h2 = _m(H1), _m(H2)
        cross = sum((_m(A) ** b * _m(B) ** a) ** (1 / (_m(a) + b)) for A, a in A_terms for B, b in B_terms)
        left = sum(_m(A) * h1 ** a for A, a in A_terms)
        right = sum(_m(B) * h2 ** (-_m(b)) for B, b in B_terms)
        return round_up((len(A_terms) + len(B_terms)) * (cross + left + right))


def _log_E(A_terms, B_terms):
    """t -> E(e^t), convex in t as a sum of exponentials."""
    A = np.array([[c, p] for c, p in A_terms], dtype=float)
    B = np.array([[c, p] for c, p in B_terms], dtype=float)

    def E(t):
        t = np.asarray(t, dtype=float)[..., None]
        with np.errstate(over="ignore"):
            return (A[:, 0] * np.exp(A[:, 1] * t)).sum(-1) + (B[:, 0] * np.exp(-B[:, 1] * t)).sum(-1)

    return E


def srinivasan_grid_min(A_terms, B_terms, H1, H2, resolution: int = 4096, eps: float = 1e-300) -> float:
    """min of E(H) on [max(H1, eps), H2]: a logarithmic grid, endpoints included,
    refined by golden-section search on log H around the best grid point."""
    _check_terms(A_terms, B_terms)
    if not 0 <= H1 <= H2:
        raise BoundError("need 0 <= H1 <= H2")
    if H2 == 0:
        return math.inf
    E = _log_E(A_terms, B_terms)
    lo, hi = math.log(max(H1, eps)), math.log(H2)
    if hi <= lo:
        return float(E(hi))
    ts = np.linspace(lo, hi, resolution)
    values = E(ts)
    i = int(np.argmin(values))
    a, b = ts[max(i - 1, 0)], ts[min(i + 1, resolution - 1)]
    ratio = (math.sqrt(5) - 1) / 2
    for _ in range(200):
        c, d = b - ratio * (b - a), a + ratio * (b - a)
        if E(c) <= E(d):
            b = d
        else:
            a = c
    return float(min(values[i], E(0.5 * (a + b))))


def lemma4_pair(k: int, a) -> Tuple[float, float]:
    """(sum_{j<k} (a/j)^(2j),  e^2 k (a/k)^(2k-2)) for k >= 3 and a > e(k-1)."""
    if k < 3:
        raise BoundError("k must be at least 3")
    with mp.workprec(BOUND_PRECISION):
        a = _m(a)
        if not a > mp.e * (k - 1):
            raise BoundError(f"a must exceed e(k-1) = {float(mp.e * (k - 1)):.6g}")
        lhs = sum((a / j) ** (2 * j) for j in range(1, k))
        rhs = mp.e**2 * k * (a / k) ** (2 * k - 2)
        return float(lhs), float(rhs)


def gorny_bound(M0, Mk, L, j: int, k: int) -> float:
    """4e (ek/j)^j {k^(j+1) M0 L^-j + e^(j-1) M0^(1-j/k) Mk^(j/k)}."""
    if k < 2 or not 1 <= j <= k - 1:
        raise BoundError("need k >= 2 and 1 <= j <= k-1")
    if not (M0 > 0 and Mk > 0 and L > 0):
        raise BoundError("M0, Mk and L must be positive")
    with mp.workprec(BOUND_PRECISION):
        M0, Mk, L = _m(M0), _m(Mk), _m(L)
        e = mp.e
        value = 4 * e * (e * k / j) ** j * (
            k ** (j + 1) * M0 * L ** (-j) + e ** (j - 1) * M0 ** (1 - mpf(j) / k) * Mk ** (mpf(j) / k))
        return round_up(value)


def hadamard_bound(sup_f, sup_f2, L) -> float:
    """(2/L) sup|f| + (L/2) sup|f''| bounds sup|f'| on an interval of length L."""
    if not L > 0:
        raise BoundError("L must be positive")
    with mp.workprec(BOUND_PRECISION):
        return round_up(2 / _m(L) * _m(sup_f) + _m(L) / 2 * _m(sup_f2))


def lemma9_gap_threshold(k: int, certk: DerivativeCertificate, delta) -> float:
    """min((c_k l_k)^(-2/(k(k+1))), delta^(-2/(k(k-1)))/2).

    Any k+1 close points not on one polynomial of degree < k span more than this.
    The value is rounded down since it is a lower bound on a span.
    """
    if k < 3:
        raise BoundError("k must be at least 3")
    if certk.order != k:
        raise BoundError("certificate order does not match k")
    with mp.workprec(BOUND_PRECISION):
        first = certk.upper ** (mpf(-2) / (k * (k + 1)))
        second = _m(as_fraction(delta)) ** (mpf(-2) / (k * (k - 1))) / 2
        return round_down(min(first, second))

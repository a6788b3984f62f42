"""Exact rational Lagrange interpolation and divided differences."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, List, Sequence, Tuple

from .curves import as_fraction


class InterpolationError(ValueError):
    pass


def _strip(coeffs: Iterable[Fraction]) -> Tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class RationalPolynomial:
    """Dense polynomial with Fraction coefficients, lowest power first.

    The zero polynomial has an empty coefficient tuple, so two polynomials
    are equal exactly when their coefficient tuples are.
    """

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @classmethod
    def constant(cls, c) -> "RationalPolynomial":
        return cls((as_fraction(c),))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x) -> Fraction:
        x = as_fraction(x) if not isinstance(x, (int, Fraction)) else x
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    def scale(self, c) -> "RationalPolynomial":
        c = as_fraction(c)
        return RationalPolynomial(c * a for a in self.coeffs)

    def taylor_shift(self, center) -> "RationalPolynomial":
        """Coefficients of P(center + t) as a polynomial in t."""
        c = as_fraction(center)
        out = list(self.coeffs)
        n = len(out)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                out[j] += c * out[j + 1]
        return RationalPolynomial(out)

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "RationalPolynomial":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(as_fraction(s) for s in data)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(reversed(parts))


def denominator(poly: RationalPolynomial) -> int:
    """Smallest q >= 1 with q * poly in Z[X]."""
    q = 1
    for c in poly.coeffs:
        q = lcm(q, c.denominator)
    return q


@dataclass(frozen=True)
class NodeSet:
    """Interpolation data: exact abscissas (sorted, distinct) and ordinates."""

    xs: Tuple[Fraction, ...]
    ys: Tuple[Fraction, ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence]) -> "NodeSet":
        data = sorted((as_fraction(x), as_fraction(y)) for x, y in pairs)
        for (a, _), (b, _) in zip(data, data[1:]):
            if a == b:
                raise InterpolationError(f"duplicate abscissa {a}")
        return cls(tuple(x for x, _ in data), tuple(y for _, y in data))

    def __len__(self) -> int:
        return len(self.xs)


def _nodes(nodes) -> NodeSet:
    return nodes if isinstance(nodes, NodeSet) else NodeSet.from_pairs(nodes)


def lagrange_interpolate(nodes) -> RationalPolynomial:
    """Sum of cardinal polynomials  f_i * prod_{j != i} (X - x_j)/(x_i - x_j)."""
    ns = _nodes(nodes)
    if len(ns) == 0:
        raise InterpolationError("need at least one node")
    # full product W(X) = prod (X - x_j), lowest power first
    W = [Fraction(1)]
    for xj in ns.xs:
        nxt = [Fraction(0)] * (len(W) + 1)
        for i, c in enumerate(W):
            nxt[i + 1] += c
            nxt[i] -= xj * c
        W = nxt
    total = [Fraction(0)] * len(ns.xs)
    for i, (xi, yi) in enumerate(zip(ns.xs, ns.ys)):
        if yi == 0:
            continue
        # synthetic division W / (X - xi)
        quot = [Fraction(0)] * (len(W) - 1)
        carry = Fraction(0)
        for d in range(len(W) - 1, 0, -1):
            carry = W[d] + carry * xi if d < len(W) - 1 else W[d]
            quot[d - 1] = carry
        denom = Fraction(1)
        for j, xj in enumerate(ns.xs):
            if j != i:
                denom *= xi - xj
        scale = yi / denom
        for d, c in enumerate(quot):
            total[d] += scale * c
    return RationalPolynomial(total)


def newton_table(nodes) -> List[Fraction]:
    """Top edge of the divided-difference table: f[x0], f[x0,x1], ..."""
    ns = _nodes(nodes)
    col = list(ns.ys)
    top = [col[0]]
    for level in range(1, len(ns)):
        col = [
            (col[i + 1] - col[i]) / (ns.xs[i + level] - ns.xs[i])
            for i in range(len(col) - 1)
        ]
        top.append(col[0])
    return top


def newton_interpolate(nodes) -> RationalPolynomial:
    """Interpolant built from the Newton form; independent of the cardinal basis."""
    ns = _nodes(nodes)
    if len(ns) == 0:
        raise InterpolationError("need at least one node")
    top = newton_table(ns)
    poly = RationalPolynomial.constant(top[-1])
    for k in range(len(top) - 2, -1, -1):
        poly = poly * RationalPolynomial((-ns.xs[k], Fraction(1))) + RationalPolynomial.constant(top[k])
    return poly


def _bareiss_det(matrix: List[List[Fraction]]) -> Fraction:
    """Determinant by fraction-free elimination with row pivoting."""
    a = [row[:] for row in matrix]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def vandermonde_product(xs: Sequence[Fraction]) -> Fraction:
    out = Fraction(1)
    for j in range(len(xs)):
        for i in range(j):
            out *= xs[j] - xs[i]
    return out


def determinant_divided_difference(nodes) -> Fraction:
    """A / prod_{i<j} (x_j - x_i), A the determinant with rows 1, x, ..., x^(k-1), f."""
    ns = _nodes(nodes)
    k = len(ns) - 1
    rows = [[x**p for x in ns.xs] for p in range(k)]
    rows.append(list(ns.ys))
    return _bareiss_det(rows) / vandermonde_product(ns.xs)


def divided_difference(nodes, check: bool = True) -> Fraction:
    """f[x0, ..., xk] = sum_j f(x_j) / prod_{i != j} (x_j - x_i).

    With ``check`` the value is compared against the determinant form and a
    mismatch raises ``ArithmeticError``.
    """
    ns = _nodes(nodes)
    if len(ns) < 2:
        raise InterpolationError("divided difference needs at least two nodes")
    total = Fraction(0)
    for j, (xj, yj) in enumerate(zip(ns.xs, ns.ys)):
        denom = Fraction(1)
        for i, xi in enumerate(ns.xs):
            if i != j:
                denom *= xj - xi
        total += yj / denom
    if check and determinant_divided_difference(ns) != total:
        raise ArithmeticError("divided difference disagrees with determinant form")
    return total

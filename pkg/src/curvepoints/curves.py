"""Evaluable plane curves y = f(x) on dyadic intervals [N, 2N].

Every curve exposes high-precision derivatives (mpmath), vectorised float
derivatives (numpy) for dense scans, and, where the values at integers are
exact rationals, an exact evaluation path.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from mpmath import mp, mpf

DEFAULT_PRECISION = int(os.environ.get("CURVEPOINTS_PRECISION", "128"))
GUARD_BITS = 24
DEFAULT_MAX_ORDER = 8


class CurveError(ValueError):
    """Invalid curve construction or evaluation request."""


class CertificateError(ValueError):
    """No two-sided derivative bound exists on the interval."""


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, decimal string, "p/q" or float.

    Floats go through their shortest repr, so 0.01 becomes 1/100.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise CurveError(f"non-finite parameter {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise CurveError(f"cannot parse rational {value!r}") from exc
    if isinstance(value, mpf):
        man, exp = value.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    raise CurveError(f"unsupported number type {type(value).__name__}")


def to_mpf(value) -> mpf:
    """Round an exact number to an mpf at the current working precision."""
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    return mpf(value)


def mpf_to_fraction(value: mpf) -> Fraction:
    man, exp = value.man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def falling_factorial(s: Fraction, k: int) -> Fraction:
    """s (s-1) ... (s-k+1)."""
    out = Fraction(1)
    for i in range(k):
        out *= s - i
    return out


def _rational_power(x: mpf, e: Fraction) -> mpf:
    if e.denominator == 1:
        return x ** int(e)
    if e.denominator == 2:
        return mp.sqrt(x) ** e.numerator
    return mp.root(x, e.denominator) ** e.numerator


@dataclass(frozen=True)
class Term:
    """One summand  base**base_exp * x**exponent.

    ``base_exp`` is 1 for ordinary rational coefficients; the
    sqrt-reciprocal family uses base_exp = 1/2 so that sqrt(x0) stays exact
    until evaluation.
    """

    base: Fraction
    exponent: Fraction
    base_exp: Fraction = Fraction(1)

    def coefficient(self) -> mpf:
        if self.base_exp == 1:
            return to_mpf(self.base)
        return _rational_power(to_mpf(self.base), self.base_exp)

    def coefficient_float(self) -> float:
        return float(self.base) ** float(self.base_exp)

    @property
    def exact(self) -> bool:
        return self.base_exp.denominator == 1 and self.exponent.denominator == 1


@dataclass(frozen=True)
class Curve:
    """Base class: a function on the closed interval [lo, hi].

    Subclasses implement ``_derivative`` (mpf), ``_derivative_array``
    (float) and optionally ``exact_value`` and ``monotone_derivative``.
    """

    N: int
    name: str = ""
    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self) -> None:
        if not isinstance(self.N, int) or self.N < 4:
            raise CurveError(f"N must be an integer >= 4, got {self.N!r}")

    family = "abstract"

    @property
    def lo(self) -> int:
        return self.N

    @property
    def hi(self) -> int:
        return 2 * self.N

    def integers(self) -> range:
        return range(self.lo, self.hi + 1)

    def _check(self, order: int, x) -> None:
        if not 0 <= order <= self.max_order:
            raise CurveError(f"unsupported derivative order {order} (max {self.max_order})")
        if x < self.lo or x > self.hi:
            raise CurveError(f"x={x} outside [{self.lo}, {self.hi}]")

    def evaluate(self, order: int, x, precision: int = DEFAULT_PRECISION) -> mpf:
        """f^(order)(x) with relative error below 2**(1 - precision)."""
        if precision < 64:
            raise CurveError("precision must be at least 64 bits")
        self._check(order, x)
        with mp.workprec(precision + GUARD_BITS):
            xv = to_mpf(x) if isinstance(x, Fraction) else mpf(x)
            value = self._derivative(order, xv)
        with mp.workprec(precision):
            return +value

    def evaluate_array(self, order: int, xs: Sequence[float]) -> np.ndarray:
        """Double-precision f^(order) on an array; for dense scans only."""
        if not 0 <= order <= self.max_order:
            raise CurveError(f"unsupported derivative order {order}")
        return self._derivative_array(order, np.asarray(xs, dtype=float))

    def exact_value(self, n: int) -> Optional[Fraction]:
        return None

    def monotone_derivative(self, order: int) -> bool:
        """True when f^(order) is provably monotone on the interval."""
        return False

    def with_N(self, N: int) -> "Curve":
        return replace(self, N=N)

    def record(self) -> str:
        raise NotImplementedError

    def _derivative(self, order: int, x: mpf) -> mpf:
        raise NotImplementedError

    def _derivative_array(self, order: int, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class MonomialCurve(Curve):
    """f(x) = sum of base**base_exp * x**exponent terms.

    Covers the monomial-sum, reciprocal-square and sqrt-reciprocal families
    and their affine-shifted variants (extra exponent-0 and exponent-1 terms).
    """

    terms: tuple = ()
    kind: str = "monomial"
    params: tuple = ()

    @property
    def family(self) -> str:  # type: ignore[override]
        return self.kind

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.terms:
            raise CurveError("a monomial curve needs at least one term")
        for t in self.terms:
            if t.base_exp != 1 and t.base <= 0:
                raise CurveError("non-integral coefficient power needs a positive base")

    def _derivative_terms(self, order: int):
        for t in self.terms:
            ff = falling_factorial(t.exponent, order)
            if ff != 0:
                yield t, ff, t.exponent - order

    def _derivative(self, order: int, x: mpf) -> mpf:
        total = mpf(0)
        for t, ff, e in self._derivative_terms(order):
            total += t.coefficient() * to_mpf(ff) * _rational_power(x, e)
        return total

    def _derivative_array(self, order: int, xs: np.ndarray) -> np.ndarray:
        total = np.zeros_like(xs)
        for t, ff, e in self._derivative_terms(order):
            total += t.coefficient_float() * float(ff) * xs ** float(e)
        return total

    def exact_value(self, n: int) -> Optional[Fraction]:
        if not all(t.exact for t in self.terms):
            return None
        total = Fraction(0)
        for t in self.terms:
            total += t.base ** int(t.base_exp) * Fraction(n) ** int(t.exponent)
        return total

    def monotone_derivative(self, order: int) -> bool:
        # f^(order+1) is a sum of c * x**e with x > 0; one common sign => monotone
        signs = set()
        for t, ff, _ in self._derivative_terms(order + 1):
            c = (t.base if t.base_exp == 1 else abs(t.base)) * ff
            if c != 0:
                signs.add(c > 0)
        return len(signs) <= 1

    def record(self) -> str:
        head = f"{self.name}: " if self.name else ""
        body = " ".join([self.kind] + [f"{k}={v}" for k, v in self.params])
        return f"{head}{body} N={self.N}"


@dataclass(frozen=True)
class SineCurve(Curve):
    """Custom curve: monomial part plus amplitude * sin(frequency * x + phase).

    Derivative bounds are only ever sampled for this family.
    """

    base: Optional[MonomialCurve] = None
    amplitude: Fraction = Fraction(0)
    frequency: Fraction = Fraction(1)
    phase: Fraction = Fraction(0)
    params: tuple = ()

    family = "sine-perturbed"

    def _derivative(self, order: int, x: mpf) -> mpf:
        w = to_mpf(self.frequency)
        wave = to_mpf(self.amplitude) * w**order * mp.sin(w * x + to_mpf(self.phase) + order * mp.pi / 2)
        if self.base is None:
            return wave
        return self.base._derivative(order, x) + wave

    def _derivative_array(self, order: int, xs: np.ndarray) -> np.ndarray:
        w = float(self.frequency)
        wave = float(self.amplitude) * w**order * np.sin(w * xs + float(self.phase) + order * np.pi / 2)
        if self.base is None:
            return wave
        return self.base._derivative_array(order, xs) + wave

    def with_N(self, N: int) -> "SineCurve":
        base = self.base.with_N(N) if self.base is not None else None
        return replace(self, N=N, base=base)

    def record(self) -> str:
        head = f"{self.name}: " if self.name else ""
        body = " ".join([self.family] + [f"{k}={v}" for k, v in self.params])
        return f"{head}{body} N={self.N}"


@dataclass(frozen=True)
class DifferenceCurve(Curve):
    """x -> f(x + a) - f(x) on [N, 2N - a]."""

    parent: Optional[Curve] = None
    step: int = 1

    family = "difference"

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.parent is None:
            raise CurveError("difference curve needs a parent")
        if not 1 <= self.step <= self.N:
            raise CurveError(f"step a={self.step} must lie in [1, N={self.N}]")

    @property
    def hi(self) -> int:
        return 2 * self.N - self.step

    def _derivative(self, order: int, x: mpf) -> mpf:
        return self.parent._derivative(order, x + self.step) - self.parent._derivative(order, x)

    def _derivative_array(self, order: int, xs: np.ndarray) -> np.ndarray:
        return self.parent._derivative_array(order, xs + self.step) - self.parent._derivative_array(order, xs)

    def exact_value(self, n: int) -> Optional[Fraction]:
        hi = self.parent.exact_value(n + self.step)
        lo = self.parent.exact_value(n)
        if hi is None or lo is None:
            return None
        return hi - lo

    def with_N(self, N: int) -> "DifferenceCurve":
        return replace(self, N=N, parent=self.parent.with_N(N))

    def record(self) -> str:
        return f"difference a={self.step} of ({self.parent.record()})"


# --------------------------------------------------------------------------
# constructors for the built-in families


def _affine_terms(shift, slope) -> list:
    out = []
    if shift:
        out.append(Term(as_fraction(shift), Fraction(0)))
    if slope:
        out.append(Term(as_fraction(slope), Fraction(1)))
    return out


def _affine_params(shift, slope) -> list:
    out = []
    if shift:
        out.append(("shift", str(as_fraction(shift))))
    if slope:
        out.append(("slope", str(as_fraction(slope))))
    return out


def monomial(terms, N: int, name: str = "", shift=0, slope=0, max_order: int = DEFAULT_MAX_ORDER) -> MonomialCurve:
    """Sum of c * x**s for (c, s) in ``terms``."""
    parsed = [Term(as_fraction(c), as_fraction(s)) for c, s in terms]
    spec = ",".join(f"{t.base}@{t.exponent}" for t in parsed)
    params = [("terms", spec)] + _affine_params(shift, slope)
    return MonomialCurve(
        N=N, name=name, max_order=max_order,
        terms=tuple(parsed + _affine_terms(shift, slope)),
        kind="monomial", params=tuple(params),
    )


def reciprocal_square(x0, N: int, name: str = "", shift=0, slope=0, max_order: int = DEFAULT_MAX_ORDER) -> MonomialCurve:
    """f(n) = x0 / n**2."""
    x0 = as_fraction(x0)
    params = [("x0", str(x0))] + _affine_params(shift, slope)
    return MonomialCurve(
        N=N, name=name, max_order=max_order,
        terms=tuple([Term(x0, Fraction(-2))] + _affine_terms(shift, slope)),
        kind="reciprocal-square", params=tuple(params),
    )


def sqrt_reciprocal(x0, N: int, name: str = "", shift=0, slope=0, max_order: int = DEFAULT_MAX_ORDER) -> MonomialCurve:
    """f(n) = sqrt(x0 / n)."""
    x0 = as_fraction(x0)
    if x0 <= 0:
        raise CurveError("sqrt-reciprocal needs x0 > 0")
    params = [("x0", str(x0))] + _affine_params(shift, slope)
    return MonomialCurve(
        N=N, name=name, max_order=max_order,
        terms=tuple([Term(x0, Fraction(-1, 2), Fraction(1, 2))] + _affine_terms(shift, slope)),
        kind="sqrt-reciprocal", params=tuple(params),
    )


def sine_perturbed(terms, amplitude, frequency, N: int, phase=0, name: str = "",
                   max_order: int = DEFAULT_MAX_ORDER) -> SineCurve:
    base = monomial(terms, N, max_order=max_order) if terms else None
    params = []
    if base is not None:
        params.append(base.params[0])
    params += [("amplitude", str(as_fraction(amplitude))),
               ("frequency", str(as_fraction(frequency))),
               ("phase", str(as_fraction(phase)))]
    return SineCurve(
        N=N, name=name, max_order=max_order, base=base,
        amplitude=as_fraction(amplitude), frequency=as_fraction(frequency),
        phase=as_fraction(phase), params=tuple(params),
    )


def difference(curve: Curve, a: int) -> DifferenceCurve:
    return DifferenceCurve(N=curve.N, name=f"{curve.name}/d{a}" if curve.name else "",
                           max_order=curve.max_order, parent=curve, step=a)


# --------------------------------------------------------------------------
# nearest integers and derivative certificates


def nearest_integer_distance(v) -> tuple:
    """Return (m, d) with m the nearest integer to v and d = |v - m|.

    Exact half-integers round to the even neighbour.
    """
    if isinstance(v, (Fraction, int)):
        v = Fraction(v)
        half = Fraction(1, 2)
    else:
        v = mpf(v)
        if not mp.isfinite(v):
            raise CurveError("nearest integer of a non-finite value")
        half = mpf(0.5)
    m = int(math.floor(v)) if isinstance(v, Fraction) else int(mp.floor(v))
    frac = v - m
    if frac > half or (frac == half and m % 2):
        m += 1
    return m, abs(v - m)


def is_half_integer(v) -> bool:
    if isinstance(v, (Fraction, int)):
        return Fraction(v).denominator == 2
    v = mpf(v)
    return bool(mp.isint(2 * v)) and not mp.isint(v)


@dataclass(frozen=True)
class DerivativeCertificate:
    """lambda_k <= |f^(k)| <= c_k * lambda_k on the curve's interval."""

    order: int
    lambda_k: mpf
    c_k: mpf
    certified: bool
    sign: int = 1
    curve: str = field(default="", compare=False)

    @property
    def upper(self) -> mpf:
        return self.lambda_k * self.c_k

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "lambda": float(self.lambda_k),
            "c": float(self.c_k),
            "certified": self.certified,
        }


SAMPLE_MARGIN = mpf("0.01")


def certify_bounds(curve: Curve, order: int, samples: int = 10_000,
                   precision: int = DEFAULT_PRECISION) -> DerivativeCertificate:
    """Two-sided bound on |f^(order)| over the curve interval.

    Monotone derivatives are bounded by their endpoint magnitudes (exact,
    certified); anything else falls back to dense float sampling widened by
    a 1% margin and is marked uncertified.
    """
    if order < 1 or order > curve.max_order:
        raise CurveError(f"unsupported derivative order {order}")
    if curve.monotone_derivative(order):
        left = curve.evaluate(order, curve.lo, precision)
        right = curve.evaluate(order, curve.hi, precision)
        if left == 0 or right == 0 or (left > 0) != (right > 0):
            raise CertificateError(f"f^({order}) vanishes or changes sign on [{curve.lo}, {curve.hi}]")
        with mp.workprec(precision):
            lo_mag, hi_mag = sorted([abs(left), abs(right)])
            c = hi_mag / lo_mag
        if c < 1:
            c = mpf(1)
        return DerivativeCertificate(order, lo_mag, c, True, 1 if left > 0 else -1, curve.name)

    xs = np.linspace(curve.lo, curve.hi, samples)
    values = curve.evaluate_array(order, xs)
    if np.any(values == 0) or (values.min() < 0 < values.max()):
        raise CertificateError(f"f^({order}) changes sign on [{curve.lo}, {curve.hi}]")
    mags = np.abs(values)
    lam = mpf(float(mags.min())) * (1 - SAMPLE_MARGIN)
    top = mpf(float(mags.max())) * (1 + SAMPLE_MARGIN)
    return DerivativeCertificate(order, lam, top / lam, False, 1 if values[0] > 0 else -1, curve.name)

"""Exact enumeration of S(f, N, delta): the integers n in [N, 2N] with ||f(n)|| < delta.

Values are computed exactly when the curve allows it (rational values at
integers) and otherwise at ``precision`` bits; points whose distance is
within a relative 2**(-precision/2) of delta cannot be classified safely and
are reported through ``guard_flags``.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from mpmath import mp, mpf

from .curves import (
    DEFAULT_PRECISION,
    Curve,
    CurveError,
    as_fraction,
    difference,
    is_half_integer,
    nearest_integer_distance,
    to_mpf,
)

Number = Union[Fraction, mpf]
MAX_DELTA = Fraction(1, 4)


class EnumerationError(ValueError):
    pass


class GuardBandError(RuntimeError):
    """Some distances are too close to delta to classify at this precision."""

    def __init__(self, flags: Sequence[int], delta) -> None:
        self.flags = list(flags)
        super().__init__(
            f"{len(self.flags)} point(s) within the guard band of delta={delta}: "
            f"{self.flags[:10]}{'...' if len(self.flags) > 10 else ''}"
        )


@dataclass(frozen=True)
class ClosePoint:
    n: int
    m: int
    offset: Number  # f(n) - m, exact when the curve value is rational

    @property
    def distance(self) -> Number:
        if isinstance(self.offset, Fraction):
            return abs(self.offset)
        with mp.workprec(max(mp.prec, self.offset.man.bit_length() + 1)):
            return abs(self.offset)

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "offset": float(self.offset), "distance": float(self.distance)}


@dataclass
class CloseSet:
    curve: str
    N: int
    delta: Fraction
    points: List[ClosePoint]
    guard_flags: List[int] = field(default_factory=list)
    ties: List[int] = field(default_factory=list)
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def members(self) -> List[int]:
        return [p.n for p in self.points]

    def header(self) -> dict:
        return {"curve": self.curve, "N": self.N, "delta": str(self.delta),
                "count": len(self.points), "guard_flags": self.guard_flags}

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header(), sort_keys=True)]
        lines += [json.dumps(p.to_json(), sort_keys=True) for p in self.points]
        return "\n".join(lines) + "\n"


@dataclass
class Scan:
    """Nearest-integer data for every integer of an interval, reusable across deltas."""

    curve: str
    N: int
    lo: int
    hi: int
    precision: int
    points: List[ClosePoint]
    exact: bool

    def close_set(self, delta, force: bool = False, wide: bool = False) -> CloseSet:
        delta = _check_delta(delta, wide)
        guard = Fraction(1, 2 ** (self.precision // 2))
        with mp.workprec(self.precision):
            d_mp = to_mpf(delta)
            band = to_mpf(delta * guard)
            members, flags, ties = [], [], []
            for p in self.points:
                d = p.distance
                if isinstance(d, Fraction):
                    inside = d < delta
                    if d == Fraction(1, 2):
                        ties.append(p.n)
                else:
                    inside = d < d_mp
                    if abs(d - d_mp) < band:
                        flags.append(p.n)
                    if is_half_integer(p.offset + p.m):
                        ties.append(p.n)
                if inside:
                    members.append(p)
        if flags and not force:
            raise GuardBandError(flags, delta)
        return CloseSet(self.curve, self.N, delta, members, flags, ties, self.lo, self.hi)


def _check_delta(delta, wide: bool = False) -> Fraction:
    delta = as_fraction(delta)
    limit = Fraction(1, 2) if wide else MAX_DELTA
    if not 0 < delta < limit:
        raise EnumerationError(f"delta must lie in (0, {limit}), got {delta}")
    return delta


def _scan_points(curve: Curve, lo: int, hi: int, precision: int) -> Tuple[List[ClosePoint], bool]:
    out = []
    exact = True
    for n in range(lo, hi + 1):
        v = curve.exact_value(n)
        if v is None:
            exact = False
            v = curve.evaluate(0, n, precision)
            with mp.workprec(precision):
                m, _ = nearest_integer_distance(v)
                out.append(ClosePoint(n, m, v - m))
        else:
            m, _ = nearest_integer_distance(v)
            out.append(ClosePoint(n, m, v - m))
    return out, exact


def _chunks(lo: int, hi: int, parts: int) -> List[Tuple[int, int]]:
    size = max(1, -(-(hi - lo + 1) // parts))
    return [(a, min(hi, a + size - 1)) for a in range(lo, hi + 1, size)]


def scan(curve: Curve, precision: int = DEFAULT_PRECISION, lo: Optional[int] = None,
         hi: Optional[int] = None, workers: int = 1) -> Scan:
    """Evaluate f at every integer of [lo, hi] (default: the curve interval)."""
    lo = curve.lo if lo is None else lo
    hi = curve.hi if hi is None else hi
    if lo < curve.lo or hi > curve.hi:
        raise CurveError(f"range [{lo}, {hi}] outside curve interval [{curve.lo}, {curve.hi}]")
    if workers > 1 and hi - lo > 1000:
        ranges = _chunks(lo, hi, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_points, [curve] * len(ranges),
                                  [a for a, _ in ranges], [b for _, b in ranges],
                                  [precision] * len(ranges)))
        points = [p for chunk, _ in parts for p in chunk]
        exact = all(e for _, e in parts)
    else:
        points, exact = _scan_points(curve, lo, hi, precision)
    return Scan(curve.name, curve.N, lo, hi, precision, points, exact)


def enumerate_close_points(curve: Curve, delta, precision: int = DEFAULT_PRECISION,
                           force: bool = False, lo: Optional[int] = None,
                           hi: Optional[int] = None, workers: int = 1,
                           wide: bool = False) -> CloseSet:
    """S(f, N, delta) in increasing order.

    ``wide`` admits 1/4 <= delta < 1/2, which only the reduction-principle
    check needs.  Raises GuardBandError on ambiguous points unless ``force``.
    """
    delta = _check_delta(delta, wide)
    return scan(curve, precision, lo, hi, workers).close_set(delta, force=force, wide=wide)


def merge_close_sets(parts: Iterable[CloseSet]) -> CloseSet:
    """Order-preserving concatenation of close sets over disjoint ranges."""
    parts = sorted(parts, key=lambda s: s.lo if s.lo is not None else 0)
    if not parts:
        raise EnumerationError("nothing to merge")
    first = parts[0]
    points, flags, ties = [], [], []
    for part in parts:
        if part.delta != first.delta or part.curve != first.curve:
            raise EnumerationError("cannot merge close sets of different curves or deltas")
        points += part.points
        flags += part.guard_flags
        ties += part.ties
    ns = [p.n for p in points]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise EnumerationError("merged ranges overlap")
    return CloseSet(first.curve, first.N, first.delta, points, flags, ties, first.lo, parts[-1].hi)


def gap_spectrum(close: Union[CloseSet, Sequence[int]]) -> Dict[int, int]:
    """Map each gap a between consecutive members to its multiplicity |S(a)|."""
    ns = close.members if isinstance(close, CloseSet) else list(close)
    if len(ns) < 2:
        raise EnumerationError("gap spectrum needs at least two points")
    return dict(sorted(Counter(b - a for a, b in zip(ns, ns[1:])).items()))


def reduced_curve(curve: Curve, a: int) -> Curve:
    """Delta_a f(x) = f(x + a) - f(x) on [N, 2N - a]."""
    if not 1 <= a <= curve.N:
        raise EnumerationError(f"a={a} must lie in [1, N={curve.N}]")
    return difference(curve, a)


def trivial_count_bound(N: int) -> int:
    return N + 1


def reduction_rhs(curve: Curve, delta, A: int, precision: int = DEFAULT_PRECISION) -> Fraction:
    """N/A + sum_{a<=A} R(Delta_a f, N, 2 delta) + 1, every R by enumeration."""
    delta = as_fraction(delta)
    total = Fraction(curve.N, A) + 1
    for a in range(1, A + 1):
        total += len(enumerate_close_points(reduced_curve(curve, a), 2 * delta, precision,
                                            force=True, wide=True))
    return total

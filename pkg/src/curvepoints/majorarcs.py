"""Major arcs: maximal runs of close points whose rounded values lie on one
rational polynomial of degree < k, their proper parts, and the constants and
checks attached to them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp, mpf

from .bounds import BOUND_PRECISION, round_up
from .curves import Curve, DerivativeCertificate, as_fraction, to_mpf
from .enumeration import CloseSet
from .interpolation import RationalPolynomial, denominator, lagrange_interpolate

DEFAULT_RESOLUTION = 16
MIN_RESOLUTION = 12


class ArcError(ValueError):
    pass


class ArcFinding(RuntimeError):
    """A computed structure contradicts what the theory predicts."""


@dataclass(frozen=True)
class MajorArc:
    members: Tuple[int, ...]
    values: Tuple[int, ...]
    poly: RationalPolynomial
    q: int
    start: int  # index of the first member in the close set

    @property
    def J(self) -> int:
        return len(self.members)

    @property
    def end(self) -> int:
        return self.start + len(self.members) - 1

    def key(self) -> tuple:
        return (self.poly.coeffs, self.start, self.end)


@dataclass(frozen=True)
class ComponentSet:
    """Sorted disjoint intervals of [lo, hi] where |f - P| < delta."""

    intervals: Tuple[Tuple[float, float], ...]
    tolerance: float
    resolution: int

    def __len__(self) -> int:
        return len(self.intervals)

    def locate(self, x: float) -> Optional[int]:
        for i, (a, b) in enumerate(self.intervals):
            if a - self.tolerance <= x <= b + self.tolerance:
                return i
        return None


@dataclass(frozen=True)
class ProperMajorArc:
    parent: int
    members: Tuple[int, ...]
    component: Tuple[float, float]
    q: int
    poly: RationalPolynomial

    @property
    def L(self) -> int:
        return self.members[-1] - self.members[0]

    @property
    def first(self) -> int:
        return self.members[0]


# --------------------------------------------------------------------------
# detection


def detect_major_arcs(close: CloseSet, curve: Optional[Curve] = None, k: int = 3) -> List[MajorArc]:
    """All major arcs of order k, ordered by first member.

    Every window of k consecutive members seeds the interpolant P through
    (n, round(f(n))); the run is extended both ways while round(f(n)) = P(n)
    and kept when it has at least k + 1 members.  Windows lying inside an
    already extended run regenerate the same P, so they are skipped.
    """
    if k < 3:
        raise ArcError("major arcs are defined for k >= 3")
    pts = close.points
    M = len(pts)
    if M < k + 1:
        return []
    found: Dict[tuple, MajorArc] = {}
    i = 0
    while i + k <= M:
        window = pts[i:i + k]
        P = lagrange_interpolate([(p.n, p.m) for p in window])
        s, e = i, i + k - 1
        while s > 0 and P(pts[s - 1].n) == pts[s - 1].m:
            s -= 1
        while e + 1 < M and P(pts[e + 1].n) == pts[e + 1].m:
            e += 1
        if e - s + 1 >= k + 1:
            arc = MajorArc(tuple(p.n for p in pts[s:e + 1]), tuple(p.m for p in pts[s:e + 1]),
                           P, denominator(P), s)
            found.setdefault(arc.key(), arc)
        i = max(i + 1, e - k + 2)
    return sorted(found.values(), key=lambda a: (a.start, a.end, a.poly.coeffs))


# --------------------------------------------------------------------------
# connected components of {|f - P| < delta}


def _poly_float(poly: RationalPolynomial, center: Fraction):
    shifted = [float(c) for c in poly.taylor_shift(center).coeffs]
    c0 = float(center)

    def evaluate(xs: np.ndarray) -> np.ndarray:
        t = xs - c0
        acc = np.zeros_like(xs)
        for c in reversed(shifted):
            acc = acc * t + c
        return acc

    return evaluate


def connected_components(curve: Curve, poly: RationalPolynomial, delta, resolution: int = DEFAULT_RESOLUTION,
                         extra: Sequence[float] = (), center=None) -> ComponentSet:
    """Maximal intervals of [lo, hi] on which |f(x) - P(x)| < delta.

    f - P is sampled on 2**resolution + 1 equally spaced points (plus
    ``extra``), and every in/out transition is bisected down to width
    2**-40 * N.  Components narrower than the grid spacing can be missed;
    callers recheck at a doubled resolution when counts look wrong.
    """
    if resolution < MIN_RESOLUTION:
        raise ArcError(f"resolution must be at least {MIN_RESOLUTION}")
    delta = float(as_fraction(delta))
    if delta <= 0:
        raise ArcError("delta must be positive")
    lo, hi = curve.lo, curve.hi
    center = Fraction(lo + hi, 2) if center is None else as_fraction(center)
    P = _poly_float(poly, center)

    def g(xs):
        return curve.evaluate_array(0, xs) - P(xs)

    xs = np.linspace(lo, hi, 2**resolution + 1)
    if len(extra):
        xs = np.unique(np.concatenate([xs, np.asarray(extra, dtype=float)]))
    inside = np.abs(g(xs)) < delta
    tol = 2.0**-40 * curve.N

    def boundary(a: float, b: float, a_inside: bool) -> float:
        # keep a on the a_inside side, b on the other
        while b - a > tol if b > a else a - b > tol:
            mid = 0.5 * (a + b)
            if (abs(g(np.array([mid]))[0]) < delta) == a_inside:
                a = mid
            else:
                b = mid
        return a if a_inside else b

    intervals = []
    idx = np.flatnonzero(np.diff(inside.astype(np.int8)))
    start = float(lo) if inside[0] else None
    for i in idx:
        if inside[i]:  # leaving
            end = boundary(xs[i], xs[i + 1], True)
            intervals.append((start, end))
            start = None
        else:  # entering
            start = boundary(xs[i + 1], xs[i], True)
    if start is not None:
        intervals.append((start, float(hi)))
    return ComponentSet(tuple(intervals), tol, resolution)


def extract_proper_arc(arc: MajorArc, components: ComponentSet, parent: int = 0) -> ProperMajorArc:
    """Arc members inside the component holding the most of them (leftmost on ties)."""
    counts: Dict[int, List[int]] = {}
    for n in arc.members:
        c = components.locate(n)
        if c is not None:
            counts.setdefault(c, []).append(n)
    if not counts:
        raise ArcFinding("no component contains an arc member; component resolution too coarse")
    best = max(sorted(counts), key=lambda c: len(counts[c]))
    return ProperMajorArc(parent, tuple(counts[best]), components.intervals[best], arc.q, arc.poly)


# --------------------------------------------------------------------------
# constants and checks


def arc_constants(k: int, c_k) -> Tuple[mpf, mpf]:
    """a_k = 36 e^-2 k (2e^3)^k c_k and b_k = 20 e^3 k^2 c_k^(2/(k(k-1)))."""
    if k < 3:
        raise ArcError("k must be at least 3")
    with mp.workprec(BOUND_PRECISION):
        c = c_k if isinstance(c_k, mpf) else to_mpf(as_fraction(c_k))
        if c < 1:
            raise ArcError("c_k must be at least 1")
        e = mp.e
        a = 36 * e**-2 * k * (2 * e**3) ** k * c
        b = 20 * e**3 * k**2 * c ** (mpf(2) / (k * (k - 1)))
        return a, b


@dataclass
class Check:
    name: str
    lhs: Optional[float]
    rhs: Optional[float]
    passed: bool
    note: str = ""

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "passed": self.passed, "note": self.note}


@dataclass
class Lemma7Report:
    part1: Check
    part2: Check
    part3: Check

    @property
    def passed(self) -> bool:
        return self.part1.passed and self.part2.passed and self.part3.passed

    def to_json(self) -> dict:
        return {"part1": self.part1.to_json(), "part2": self.part2.to_json(), "part3": self.part3.to_json()}


def lemma7_report(proper: ProperMajorArc, arc: MajorArc, close: CloseSet, k: int,
                  certk: Optional[DerivativeCertificate], delta) -> Lemma7Report:
    """Evaluate the three length / size / separation statements for one proper arc.

    A proper arc needs more than k members; smaller extractions are reported
    as vacuous passes.  Without a certificate, parts 1 and 3 are not
    evaluable and are reported as vacuous.
    """
    if certk is not None and certk.order != k:
        raise ArcError("certificate order differs from the detection order")
    size, L, q = len(proper.members), proper.L, proper.q
    if size <= k:
        note = f"only {size} members (<= k); not a proper arc"
        return Lemma7Report(Check("length", None, None, True, note), Check("size", None, None, True, note),
                            Check("separation", None, None, True, note))
    with mp.workprec(BOUND_PRECISION):
        d = to_mpf(as_fraction(delta))
        rhs2 = 2 * k * L * mpf(q) ** (mpf(-2) / (k * (k - 1)))
        part2 = Check("size", size, float(rhs2), size <= rhs2)
        if certk is None:
            part1 = Check("length", L, None, True, "no certificate")
            part3 = Check("separation", None, None, True, "no certificate")
            return Lemma7Report(part1, part2, part3)
        rhs1 = 2 * k * (d / certk.lambda_k) ** (mpf(1) / k)
        part1 = Check("length", L, float(rhs1), L <= rhs1)
        a_k, _ = arc_constants(k, certk.c_k)
        Q = 1 / (a_k * d)
        if q > Q:
            part3 = Check("separation", None, None, True, f"q={q} > (a_k delta)^-1 = {float(Q):.4g}; not applicable")
        else:
            threshold = L * (a_k * q * d) ** (mpf(-1) / k)
            in_arc = set(arc.members)
            outside = [n for n in close.members if n not in in_arc]
            if not outside:
                part3 = Check("separation", None, float(threshold), True, "no points outside the arc")
            else:
                pm = np.asarray(proper.members)
                dist = min(int(np.min(np.abs(pm - n))) for n in outside)
                part3 = Check("separation", dist, float(threshold), dist > threshold)
    return Lemma7Report(part1, part2, part3)


def major_arc_contribution_bound(N: int, delta, k: int, certk: DerivativeCertificate, branch: int = 2) -> float:
    """Upper bound on the number of close points lying in major arcs."""
    if k < 3:
        raise ArcError("k must be at least 3")
    _, b = arc_constants(k, certk.c_k)
    with mp.workprec(BOUND_PRECISION):
        d = to_mpf(as_fraction(delta))
        main = b * N * d ** (mpf(2) / (k * (k - 1)))
        ratio = (d / certk.lambda_k) ** (mpf(1) / k)
        tail = 10 * mp.e**3 * k**2
        if branch == 1:
            value = main + 8 * k**3 * ratio + tail
        elif branch == 2:
            value = mpf(3) / 2 * main + 16 * k**3 * ratio + tail
        else:
            raise ArcError("branch must be 1 or 2")
        return round_up(value)


@dataclass
class Decomposition:
    S0: List[int]
    T0: List[int]
    certificate: bool
    covers: List[Tuple[float, float]] = field(default_factory=list)


def small_denominator_arcs(propers: Sequence[ProperMajorArc], k: int, c_k, delta) -> List[ProperMajorArc]:
    """Proper arcs with q <= (a_k delta)^-1, ordered by first member."""
    a_k, _ = arc_constants(k, c_k)
    with mp.workprec(BOUND_PRECISION):
        Q = 1 / (a_k * to_mpf(as_fraction(delta)))
        return sorted((p for p in propers if p.q <= Q), key=lambda p: p.first)


def arc_decomposition(close: CloseSet, arcs: Sequence[MajorArc], propers: Sequence[ProperMajorArc] = (),
                      k: int = 3, c_k=1, delta=None) -> Decomposition:
    """Split S into S0 (points of some major arc) and T0, and certify cover disjointness.

    The certificate holds when the intervals [n_j, n_j + L_j (a_k q_j delta)^(-1/k)]
    of all proper arcs with q_j <= (a_k delta)^-1 are pairwise disjoint
    (vacuously when there are none).
    """
    in_arcs = set()
    for arc in arcs:
        in_arcs.update(arc.members)
    S0 = [n for n in close.members if n in in_arcs]
    T0 = [n for n in close.members if n not in in_arcs]
    delta = close.delta if delta is None else as_fraction(delta)
    small = small_denominator_arcs(propers, k, c_k, delta) if propers else []
    covers = []
    if small:
        a_k, _ = arc_constants(k, c_k)
        with mp.workprec(BOUND_PRECISION):
            d = to_mpf(delta)
            for p in small:
                covers.append((p.first, p.first + p.L * (a_k * p.q * d) ** (mpf(-1) / k)))
    ok = all(covers[i][1] < covers[i + 1][0] for i in range(len(covers) - 1))
    return Decomposition(S0, T0, ok, [(float(a), float(b)) for a, b in covers])


def proper_arcs_disjoint(propers: Sequence[ProperMajorArc]) -> bool:
    """True when no two proper arcs overlap as integer ranges."""
    spans = sorted((p.members[0], p.members[-1]) for p in propers)
    return all(a[1] < b[0] for a, b in zip(spans, spans[1:]))


# --------------------------------------------------------------------------
# full analysis for one instance


@dataclass
class ArcAnalysis:
    k: int
    arcs: List[MajorArc]
    components: List[ComponentSet]
    propers: List[ProperMajorArc]
    lemma7: List[Lemma7Report]
    decomposition: Decomposition
    findings: List[str] = field(default_factory=list)
    rechecked: int = 0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "arcs": [
                {
                    "P": arc.poly.to_json(),
                    "q": arc.q,
                    "members": list(arc.members),
                    "proper_members": list(pr.members),
                    "L": pr.L,
                    "component": [comp_lo, comp_hi],
                    "components": len(comps),
                    "lemma7": rep.to_json(),
                }
                for arc, pr, comps, rep in zip(self.arcs, self.propers, self.components, self.lemma7)
                for comp_lo, comp_hi in [pr.component]
            ],
            "S0": len(self.decomposition.S0),
            "T0": len(self.decomposition.T0),
            "disjointness_certificate": self.decomposition.certificate,
            "findings": self.findings,
        }


def analyze_arcs(curve: Curve, close: CloseSet, k: int, certk: Optional[DerivativeCertificate] = None,
                 resolution: int = DEFAULT_RESOLUTION) -> ArcAnalysis:
    """Detect arcs, extract proper arcs, run the checks and the decomposition."""
    arcs = detect_major_arcs(close, curve, k)
    comps, propers, reports, findings = [], [], [], []
    rechecked = 0
    for idx, arc in enumerate(arcs):
        center = Fraction(arc.members[0] + arc.members[-1], 2)
        cs = connected_components(curve, arc.poly, close.delta, resolution, extra=arc.members, center=center)
        if len(cs) > k:
            rechecked += 1
            cs = connected_components(curve, arc.poly, close.delta, resolution + 1, extra=arc.members, center=center)
            if len(cs) > k:
                findings.append(f"arc {idx}: {len(cs)} components > k={k} after doubled resolution")
        try:
            pr = extract_proper_arc(arc, cs, idx)
        except ArcFinding as exc:
            findings.append(f"arc {idx}: {exc}")
            pr = ProperMajorArc(idx, arc.members, (float(arc.members[0]), float(arc.members[-1])), arc.q, arc.poly)
        comps.append(cs)
        propers.append(pr)
        reports.append(lemma7_report(pr, arc, close, k, certk, close.delta))
    c_k = certk.c_k if certk is not None else 1
    decomposition = arc_decomposition(close, arcs, propers if certk is not None else (), k, c_k, close.delta)
    return ArcAnalysis(k, arcs, comps, propers, reports, decomposition, findings, rechecked)

"""Text records for curves: parsing, catalog loading and lookup.

Record grammar (one per line, ``#`` starts a comment)::

    [name:] family key=value ... [N=<int>]

Inline ``--curve`` arguments on the command line use the same grammar, so
``--curve "monomial terms=1@1/2"`` and a catalog name both work.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

from .curves import (
    Curve,
    CurveError,
    monomial,
    reciprocal_square,
    sine_perturbed,
    sqrt_reciprocal,
)

FAMILIES = ("monomial", "reciprocal-square", "sqrt-reciprocal", "sine-perturbed")
_ALLOWED = {
    "monomial": {"terms", "shift", "slope"},
    "reciprocal-square": {"x0", "shift", "slope"},
    "sqrt-reciprocal": {"x0", "shift", "slope"},
    "sine-perturbed": {"terms", "amplitude", "frequency", "phase"},
}


def _parse_terms(text: str) -> list:
    out = []
    for chunk in text.split(","):
        if "@" not in chunk:
            raise CurveError(f"term {chunk!r} is not of the form coefficient@exponent")
        c, s = chunk.split("@", 1)
        out.append((c, s))
    return out


def parse_curve(record: str, N: Optional[int] = None) -> Curve:
    """Build a curve from one record; an explicit ``N`` overrides the record's."""
    text = record.split("#", 1)[0].strip()
    if not text:
        raise CurveError("empty curve record")
    tokens = text.split()
    name = ""
    if tokens[0].endswith(":"):
        name = tokens.pop(0)[:-1]
    if not tokens:
        raise CurveError(f"record {record!r} has no family")
    family = tokens.pop(0)
    if family not in FAMILIES:
        raise CurveError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    fields: Dict[str, str] = {}
    for tok in tokens:
        if "=" not in tok:
            raise CurveError(f"malformed field {tok!r} (expected key=value)")
        key, value = tok.split("=", 1)
        if key in fields:
            raise CurveError(f"duplicate field {key!r}")
        fields[key] = value

    record_N = fields.pop("N", None)
    if N is None:
        if record_N is None:
            raise CurveError(f"no N given for curve {name or family!r}")
        try:
            N = int(record_N)
        except ValueError as exc:
            raise CurveError(f"N must be an integer, got {record_N!r}") from exc
    max_order = int(fields.pop("max_order", 8))

    unknown = set(fields) - _ALLOWED[family]
    if unknown:
        raise CurveError(f"unknown fields for {family}: {', '.join(sorted(unknown))}")

    common = dict(N=N, name=name, max_order=max_order)
    if family == "monomial":
        if "terms" not in fields:
            raise CurveError("monomial needs terms=")
        return monomial(_parse_terms(fields["terms"]), shift=fields.get("shift", 0),
                        slope=fields.get("slope", 0), **common)
    if family in ("reciprocal-square", "sqrt-reciprocal"):
        if "x0" not in fields:
            raise CurveError(f"{family} needs x0=")
        build = reciprocal_square if family == "reciprocal-square" else sqrt_reciprocal
        return build(fields["x0"], shift=fields.get("shift", 0), slope=fields.get("slope", 0), **common)
    for key in ("amplitude", "frequency"):
        if key not in fields:
            raise CurveError(f"sine-perturbed needs {key}=")
    terms = _parse_terms(fields["terms"]) if "terms" in fields else None
    return sine_perturbed(terms, fields["amplitude"], fields["frequency"],
                          phase=fields.get("phase", 0), **common)


def parse_catalog(text: str) -> List[Curve]:
    curves = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.split("#", 1)[0].strip():
            continue
        try:
            curves.append(parse_curve(line))
        except CurveError as exc:
            raise CurveError(f"line {lineno}: {exc}") from exc
    names = [c.name for c in curves if c.name]
    if len(names) != len(set(names)):
        raise CurveError("duplicate curve names in catalog")
    return curves


def load_catalog(path: Optional[Path] = None) -> List[Curve]:
    """Read a catalog file, or the bundled default when ``path`` is None."""
    if path is None:
        text = resources.files("curvepoints").joinpath("data/catalog.txt").read_text()
    else:
        text = Path(path).read_text()
    return parse_catalog(text)


def resolve_curve(ref: str, N: Optional[int] = None, catalog: Optional[List[Curve]] = None) -> Curve:
    """Catalog name or inline record -> curve, with ``N`` overriding."""
    catalog = load_catalog() if catalog is None else catalog
    for curve in catalog:
        if curve.name == ref:
            return curve.with_N(N) if N is not None else curve
    return parse_curve(ref, N)

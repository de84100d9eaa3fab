"""Curve database: a strict JSON format for Weierstrass models plus metadata.

The format is deliberately rigid - exactly the documented fields, nothing
else - so that typos in metadata fail loudly at load time instead of
corrupting downstream measurements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .ellcurve import CurveModel
from .errors import ParseError, ValidationError

_REQUIRED = {"label", "a_invariants", "conductor"}
_OPTIONAL = {"cm_discriminant", "modular_degree", "known_generators"}


@dataclass(frozen=True)
class CurveDatabaseEntry:
    label: str
    a_invariants: tuple[int, int, int, int, int]
    conductor: int
    cm_discriminant: int | None = None
    modular_degree: int | None = None
    known_generators: tuple[tuple[Fraction, Fraction], ...] = ()

    def curve(self) -> CurveModel:
        a1, a2, a3, a4, a6 = self.a_invariants
        return CurveModel(
            a1,
            a2,
            a3,
            a4,
            a6,
            conductor=self.conductor,
            label=self.label,
            cm_discriminant=self.cm_discriminant,
            modular_degree=self.modular_degree,
        )


def _parse_rational(raw, where: str) -> Fraction:
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: bad rational {raw!r}: {exc}") from None
    raise ParseError(f"{where}: rational must be an integer or 'p/q' string")


def _parse_entry(obj, index: int) -> CurveDatabaseEntry:
    where = f"entry {index}"
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = set(obj) - _REQUIRED - _OPTIONAL
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = _REQUIRED - set(obj)
    if missing:
        raise ParseError(f"{where}: missing field(s) {sorted(missing)}")
    label = obj["label"]
    if not isinstance(label, str) or not label:
        raise ParseError(f"{where}: label must be a nonempty string")
    where = f"entry {index} ({label})"
    ai = obj["a_invariants"]
    if (
        not isinstance(ai, list)
        or len(ai) != 5
        or not all(isinstance(a, int) for a in ai)
    ):
        raise ParseError(f"{where}: a_invariants must be five integers")
    N = obj["conductor"]
    if not isinstance(N, int) or N < 1:
        raise ParseError(f"{where}: conductor must be a positive integer")
    cm = obj.get("cm_discriminant")
    if cm is not None and (not isinstance(cm, int) or cm >= 0):
        raise ParseError(f"{where}: cm_discriminant must be a negative integer")
    deg = obj.get("modular_degree")
    if deg is not None and (not isinstance(deg, int) or deg < 1):
        raise ParseError(f"{where}: modular_degree must be a positive integer")
    gens = []
    for j, g in enumerate(obj.get("known_generators", ())):
        gwhere = f"{where}, generator {j}"
        if not isinstance(g, list) or len(g) != 2:
            raise ParseError(f"{gwhere}: expected [x, y]")
        gens.append((_parse_rational(g[0], gwhere), _parse_rational(g[1], gwhere)))
    entry = CurveDatabaseEntry(
        label=label,
        a_invariants=tuple(ai),
        conductor=N,
        cm_discriminant=cm,
        modular_degree=deg,
        known_generators=tuple(gens),
    )
    _validate(entry, where)
    return entry


def _validate(entry: CurveDatabaseEntry, where: str) -> None:
    E = entry.curve()
    if E.discriminant == 0:
        raise ValidationError(f"{where}: singular model (discriminant 0)")
    for j, (x, y) in enumerate(entry.known_generators):
        lhs = y * y + E.a1 * x * y + E.a3 * y
        if lhs != E.rhs(x):
            raise ValidationError(
                f"{where}, generator {j}: ({x}, {y}) is not on the curve"
            )


def load_database(path: str | None = None) -> tuple[CurveDatabaseEntry, ...]:
    """Load and validate a curve database; with no path, the bundled one."""
    if path is None:
        text = (
            resources.files("heegnerlab").joinpath("data/curves.json").read_text()
        )
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, list):
        raise ParseError("top level must be an array of entries")
    entries = tuple(_parse_entry(obj, i) for i, obj in enumerate(doc))
    labels = [e.label for e in entries]
    if len(set(labels)) != len(labels):
        raise ValidationError("duplicate labels in database")
    return entries


def find_curve(label: str, path: str | None = None) -> CurveDatabaseEntry:
    for entry in load_database(path):
        if entry.label == label:
            return entry
    raise ValidationError(f"no curve labelled {label!r} in database")

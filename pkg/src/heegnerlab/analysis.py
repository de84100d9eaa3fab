"""Measurement harness on top of the orbit machinery.

Orbit-degree counts (the field-degree observable), bounded integer-relation
search across all conjugate embeddings with exact group-law verification,
odd-part bookkeeping, and assembled independence reports.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp, mpc

from . import arith, qform
from .ellcurve import CurveModel, CurvePoint, INFINITY, point, point_add, point_mul
from .errors import (
    ClusterAmbiguous,
    FieldMismatch,
    HeegnerConditionFailed,
    RecognitionFailed,
)
from .heegner import heegner_condition
from .lattice import Lattice
from .modparam import OrbitEvaluation, orbit_points, recognize, trace_point

_CLUSTER_TOL = 1e-10
_TORSION_CAP = 12


def _cluster_count(values, tol: float) -> int:
    """Number of distinct values up to tol; ambiguous when a merge decision
    falls in the (tol, 10*tol) dead zone."""
    vals = sorted(values, key=lambda v: (mp.re(v), mp.im(v)))
    reps: list[mpc] = []
    for v in vals:
        dists = [abs(v - r) for r in reps]
        if dists and min(dists) <= tol:
            continue
        if dists and min(dists) < 10 * tol:
            raise ClusterAmbiguous(
                f"cluster gap {float(min(dists)):.3e} within 10x of tolerance"
            )
        reps.append(v)
    return len(reps)


def orbit_degree(E: CurveModel, D: int, n: int, precision_bits: int) -> int:
    """Distinct x-coordinates among {x(n * P^sigma)} over the full conjugate
    orbit; n-multiplication is done on the torus as n*z mod the lattice."""
    if not 1 <= n <= _TORSION_CAP:
        raise ValueError("n must be in 1..12")
    if not heegner_condition(D, E.conductor):
        raise HeegnerConditionFailed(f"D={D} inadmissible for level {E.conductor}")
    orbit = orbit_points(E, D, precision_bits)
    L = orbit.lattice
    xs = []
    with mp.workprec(precision_bits + 20):
        for z in orbit.points_z:
            nz = L.reduce(n * z)
            if L.distance(nz) < mp.mpf(2) ** (-(precision_bits // 2)):
                # n*P is the identity; count it as one shared value
                xs.append(mp.mpc(mp.inf))
                continue
            from .lattice import weierstrass_map

            x, _ = weierstrass_map(nz, E, L)
            xs.append(x)
        finite = [x for x in xs if x != mp.mpc(mp.inf)]
        count = _cluster_count(finite, _CLUSTER_TOL) if finite else 0
        if len(finite) < len(xs):
            count += 1
        return count


@dataclass(frozen=True)
class Relation:
    """t*(n_1 P_1 + ... + n_r P_r) = identity, t a torsion slack <= 12."""

    coefficients: tuple[int, ...]
    torsion_slack: int

    def __post_init__(self):
        if not any(self.coefficients):
            raise ValueError("coefficients must not all vanish")
        if not 1 <= self.torsion_slack <= _TORSION_CAP:
            raise ValueError("torsion_slack must be in 1..12")


@dataclass(frozen=True)
class EmbeddingSet:
    """One base point with all its conjugate logarithm embeddings."""

    zs: tuple[mpc, ...]
    lattice: Lattice

    @staticmethod
    def from_orbit(orbit: OrbitEvaluation) -> "EmbeddingSet":
        return EmbeddingSet(zs=tuple(orbit.points_z), lattice=orbit.lattice)


def _coefficient_vectors(r: int, B: int):
    # lexicographic: n_1 ascending from 0, later entries -B..B ascending
    first = range(0, B + 1)
    rest = [range(-B, B + 1)] * (r - 1)
    for vec in itertools.product(first, *rest):
        if any(vec):
            yield vec


def relation_search(points, B: int, precision_bits: int) -> Relation | None:
    """Exhaustive box search for integer dependence among base points.

    points: sequence of EmbeddingSet (or OrbitEvaluation).  A candidate
    (n_1..n_r, t) passes only if t * sum n_i z_i^(sigma) is within
    2^-(precision_bits/2) of the lattice at every combination of available
    conjugate embeddings, with the next-nearest lattice point at least
    2^10 times farther.  First passing candidate in lexicographic order wins.
    """
    sets = [
        EmbeddingSet.from_orbit(p) if isinstance(p, OrbitEvaluation) else p
        for p in points
    ]
    r = len(sets)
    if not 2 <= r <= 4:
        raise ValueError("relation search supports 2..4 points")
    if not 1 <= B <= 50:
        raise ValueError("B must be in 1..50")
    tol = mp.mpf(2) ** (-(precision_bits // 2))
    with mp.workprec(precision_bits + 20):
        combos = list(itertools.product(*(range(len(s.zs)) for s in sets)))
        scale = [
            max(abs(s.lattice.omega1), abs(s.lattice.omega2)) for s in sets
        ]
        for vec in _coefficient_vectors(r, B):
            for t in range(1, _TORSION_CAP + 1):
                ok = True
                for combo in combos:
                    # all embeddings share the first point's lattice when the
                    # points sit on one curve; use that lattice for the sum
                    L = sets[0].lattice
                    z = mp.mpc(0)
                    for i, (s, ci) in enumerate(zip(sets, combo)):
                        z += vec[i] * s.zs[ci]
                    z *= t
                    d0, d1 = L.nearest_distances(z)
                    if d0 >= tol * scale[0] or d1 < (2**10) * tol * scale[0]:
                        ok = False
                        break
                if ok:
                    return Relation(coefficients=vec, torsion_slack=t)
    return None


def verify_relation(exact_points, rel: Relation, E: CurveModel) -> bool:
    """Exact group-law check of t * sum n_i P_i = identity.

    exact_points: CurvePoints with coordinates in Q or a single common
    quadratic field (FieldMismatch otherwise - verification stays numerical).
    """
    fields = set()
    for P in exact_points:
        f = P.field()
        if f is not None:
            fields.add(f)
    if len(fields) > 1:
        raise FieldMismatch(f"points live over sqrt of {sorted(fields)}")
    acc = INFINITY
    for n, P in zip(rel.coefficients, exact_points):
        acc = point_add(acc, point_mul(n, P, E), E)
    acc = point_mul(rel.torsion_slack, acc, E)
    return acc.is_infinity


@dataclass(frozen=True)
class FieldEntry:
    discriminant: int
    admissible: bool
    error: str | None = None
    class_number: int | None = None
    odd_part: int | None = None
    prime_to_bound_part: int | None = None  # part of h coprime to the search bound
    orbit_degrees: tuple[int, ...] = ()  # degrees for n = 1, 2, 3
    recognition: str | None = None  # human-readable outcome
    trace_is_identity: bool | None = None
    ring_class_number: int | None = None
    ring_class_odd_part: int | None = None
    divisibility_ok: bool | None = None  # h | orbitdeg * (modular_degree)!


@dataclass(frozen=True)
class IndependenceReport:
    curve_label: str
    entries: tuple[FieldEntry, ...]
    search_bound: int
    relation: Relation | None
    verdict: str  # relation_found_verified | relation_found_numerical | no_relation_up_to_bound
    hypothesis_note: str


def independence_report(
    E: CurveModel,
    discs,
    B: int,
    precision_bits: int,
    conductor: int | None = None,
) -> IndependenceReport:
    """Run the whole pipeline over several imaginary quadratic fields and
    assemble the three-valued verdict.  Per-field failures are recorded in
    the entries, never raised."""
    if len(set(discs)) != len(discs):
        raise ValueError("discriminants must be distinct")
    entries = []
    orbits = []
    exact = []  # recognized rational points, aligned with orbits; None gaps
    for D in discs:
        if not heegner_condition(D, E.conductor):
            entries.append(
                FieldEntry(
                    discriminant=D,
                    admissible=False,
                    error="HeegnerConditionFailed",
                )
            )
            continue
        try:
            entries.append(_field_entry(E, D, precision_bits, conductor, orbits, exact, B))
        except Exception as exc:  # per-entry failures are data, not crashes
            entries.append(
                FieldEntry(discriminant=D, admissible=True, error=repr(exc))
            )
    relation = None
    verdict = "no_relation_up_to_bound"
    if len(orbits) >= 2:
        relation = relation_search(orbits[:4], B, precision_bits)
        if relation is not None:
            verdict = "relation_found_numerical"
            pts = [exact[i] for i in range(len(relation.coefficients))]
            if all(p is not None for p in pts):
                try:
                    if verify_relation(pts, relation, E):
                        verdict = "relation_found_verified"
                except FieldMismatch:
                    pass
    odd_parts = [e.odd_part for e in entries if e.odd_part is not None]
    note = (
        "measured odd parts of the class numbers: "
        + ", ".join(str(o) for o in odd_parts)
        + "; the independence criterion requires them to exceed a constant "
        "depending only on the curve and its parametrization, which is not "
        "explicit - the values are recorded, not compared."
    )
    return IndependenceReport(
        curve_label=E.label or f"conductor {E.conductor}",
        entries=tuple(entries),
        search_bound=B,
        relation=relation,
        verdict=verdict,
        hypothesis_note=note,
    )


def _field_entry(E, D, precision_bits, conductor, orbits, exact, B):
    cg = qform.enumerate_reduced(D)
    h = len(cg.forms)
    orbit = orbit_points(E, D, precision_bits)
    orbits.append(orbit)
    degs = tuple(orbit_degree(E, D, n, precision_bits) for n in (1, 2, 3))
    tr = trace_point(orbit)
    recog = None
    exact_pt = None
    if tr.is_identity:
        recog = "trace is the identity"
    else:
        try:
            if tr.is_real:
                rec = recognize([tr.xy], 10**6, E, precision_bits=precision_bits)
            else:
                x, y = tr.xy
                with mp.workprec(precision_bits + 20):
                    conj = (mp.conj(x), mp.conj(y))
                rec = recognize(
                    [(x, y), conj],
                    10**6,
                    E,
                    precision_bits=precision_bits,
                )
            if rec.kind == "rational":
                rx, ry = rec.value
                exact_pt = point(rx, ry)
                recog = f"rational ({rx}, {ry})"
            else:
                if rec.kind == "quadratic":
                    exact_pt = CurvePoint(rec.value[0], rec.value[1])
                recog = f"{rec.kind} {rec.value}"
        except RecognitionFailed as exc:
            recog = f"unrecognized: {exc}"
    exact.append(exact_pt)
    rc = rc_odd = None
    if conductor is not None:
        rc = qform.ring_class_number(D, conductor)
        rc_odd = arith.odd_part(rc).odd_part
    div_ok = None
    if E.modular_degree is not None:
        div_ok = (degs[0] * math.factorial(E.modular_degree)) % h == 0
    return FieldEntry(
        discriminant=D,
        admissible=True,
        class_number=h,
        odd_part=arith.odd_part(h).odd_part,
        prime_to_bound_part=arith.prime_to_B_part(h, B),
        orbit_degrees=degs,
        recognition=recog,
        trace_is_identity=tr.is_identity,
        ring_class_number=rc,
        ring_class_odd_part=rc_odd,
        divisibility_ok=div_ok,
    )

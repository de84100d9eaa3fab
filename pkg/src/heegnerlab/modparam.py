"""Numerical modular parametrization.

Evaluates phi(tau) = sum a_n q^n / n on the upper half plane, pushes whole
conjugate orbits of class-field points through the uniformization, forms
trace points, and recognizes algebraic coordinates (exact rationals,
quadratic irrationals, or integer minimal polynomials).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpc, mpf
from sympy import factorint

from .ellcurve import CurveModel, QuadElt, an_coeffs
from .errors import ConvergenceTooSlow, RecognitionFailed
from .heegner import heegner_condition, heegner_fiber
from .lattice import Lattice, periods, weierstrass_map
from .qform import enumerate_reduced

_M_CAP = 10**6


def _terms_needed(abs_q: mpf, precision_bits: int) -> int:
    # tail sum_{n>M} |q|^n/n < |q|^(M+1) / ((M+1)(1-|q|)); solve for M
    target = mp.mpf(2) ** (-(precision_bits + 4))
    if abs_q >= 1:
        raise ConvergenceTooSlow("tau is not in the upper half plane")
    M = 1
    while M <= _M_CAP:
        bound = abs_q ** (M + 1) / ((M + 1) * (1 - abs_q))
        if bound < target:
            return M
        # |q|^M shrinks geometrically; step by the log-estimate remainder
        M = max(M + 1, int(M * 1.3))
    raise ConvergenceTooSlow(
        "more than 10^6 q-series terms required; Im(tau) too small"
    )


@functools.lru_cache(maxsize=8)
def _cached_coeffs(a1, a2, a3, a4, a6, N, M):
    return an_coeffs(CurveModel(a1, a2, a3, a4, a6, N), M)


def eval_phi(E: CurveModel, tau: mpc, precision_bits: int) -> mpc:
    """sum_{n<=M} a_n e^{2 pi i n tau} / n, truncated so the geometric
    tail bound stays below 2^-(precision_bits+4).  The value is the
    pre-lattice-reduction image of tau in C."""
    if mp.im(tau) < mp.mpf("1e-3"):
        raise ConvergenceTooSlow("Im(tau) below 10^-3")
    with mp.workprec(precision_bits + 20):
        q = mp.exp(2j * mp.pi * tau)
        M = _terms_needed(abs(q), precision_bits)
        coeffs = _cached_coeffs(E.a1, E.a2, E.a3, E.a4, E.a6, E.conductor, M)
        # Horner in q: phi = q*(c_1 + q*(c_2 + ...)), c_n = a_n/n
        acc = mp.mpc(0)
        for n in range(M, 0, -1):
            acc = acc * q + mp.mpf(coeffs.a(n)) / n
        return acc * q


def phi_terms_used(E: CurveModel, tau: mpc, precision_bits: int) -> int:
    with mp.workprec(precision_bits + 20):
        q = mp.exp(2j * mp.pi * tau)
        return _terms_needed(abs(q), precision_bits)


@dataclass(frozen=True)
class OrbitEvaluation:
    """Images of a full conjugate orbit of class-field points on the curve.

    points_z are lattice-reduced Abel-Jacobi images, one per ideal class;
    points_xy the corresponding curve coordinates.
    """

    curve: CurveModel
    discriminant: int
    points_z: tuple[mpc, ...]
    points_xy: tuple[tuple[mpc, mpc], ...]
    precision_bits: int
    terms_used: int
    lattice: Lattice


def orbit_points(E: CurveModel, D: int, precision_bits: int) -> OrbitEvaluation:
    """Evaluate phi at every fiber representative over level E.conductor and
    discriminant D, reduce mod the period lattice, and map to curve
    coordinates."""
    if not heegner_condition(D, E.conductor):
        raise ValueError(f"discriminant {D} is not admissible for level {E.conductor}")
    fiber = heegner_fiber(D, E.conductor)
    L = periods(E, precision_bits)
    zs = []
    xys = []
    terms = 0
    with mp.workprec(precision_bits + 20):
        for rep in fiber:
            tau = rep.tau(precision_bits + 20)
            terms = max(terms, phi_terms_used(E, tau, precision_bits))
            z = L.reduce(eval_phi(E, tau, precision_bits))
            zs.append(z)
            xys.append(weierstrass_map(z, E, L))
    return OrbitEvaluation(
        curve=E,
        discriminant=D,
        points_z=tuple(zs),
        points_xy=tuple(xys),
        precision_bits=precision_bits,
        terms_used=terms,
        lattice=L,
    )


@dataclass(frozen=True)
class TracePoint:
    z: mpc
    is_identity: bool
    xy: tuple[mpc, mpc] | None  # None exactly when is_identity
    is_real: bool  # imaginary parts of (x, y) vanish to tolerance
    half_lattice: bool  # z sits in (1/2)L but not L: index discrepancy


def trace_point(orbit: OrbitEvaluation) -> TracePoint:
    """Sum of the orbit in C/L.  A lattice-trivial sum is reported as the
    identity; a sum landing in the strict index-two superlattice (1/2)L is
    flagged rather than resolved."""
    L = orbit.lattice
    prec = orbit.precision_bits
    with mp.workprec(prec + 20):
        z = L.reduce(mp.fsum(mp.re(w) for w in orbit.points_z)
                     + 1j * mp.fsum(mp.im(w) for w in orbit.points_z))
        tol = mp.mpf(2) ** (-(prec // 2))
        scale = max(abs(L.omega1), abs(L.omega2))
        if L.distance(z) < tol * scale:
            return TracePoint(z=z, is_identity=True, xy=None,
                              is_real=True, half_lattice=False)
        half = L.distance(2 * z) < tol * scale
        x, y = weierstrass_map(z, orbit.curve, L)
        real = abs(mp.im(x)) < tol * (1 + abs(x)) and abs(mp.im(y)) < tol * (
            1 + abs(y)
        )
        return TracePoint(z=z, is_identity=False, xy=(x, y),
                          is_real=real, half_lattice=half)


@dataclass(frozen=True)
class RecognizedAlgebraic:
    kind: str  # "rational" | "quadratic" | "minpoly"
    value: object  # (Fraction, Fraction) | (QuadElt, QuadElt) | tuple of int
    residual: mpf


_RESIDUAL_CAP = 2.0**-20


def _mpf_to_fraction(x: mpf) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(int(man), 1) * (Fraction(2) ** int(exp))
    return -v if sign else v


def _round_rational(v, bound: int) -> tuple[Fraction, mpf]:
    r = _mpf_to_fraction(mp.re(v)).limit_denominator(bound)
    err = abs(mp.re(v) - mp.mpf(r.numerator) / r.denominator)
    return r, err


def _as_pairs(values):
    out = []
    for v in values:
        if isinstance(v, (tuple, list)) and len(v) == 2:
            out.append((mp.mpc(v[0]), mp.mpc(v[1])))
        else:
            out.append(None)
    return out if all(p is not None for p in out) else None


def recognize(
    values,
    denominator_bound: int,
    E: CurveModel | None = None,
    precision_bits: int = 200,
):
    """Identify exact algebraic coordinates behind numerical conjugates.

    values: a single complex number, a single (x, y) pair, or a conjugate
    multiset of either.  Rational and quadratic kinds are accepted only when
    the recovered exact point satisfies the curve equation exactly; the
    minpoly kind only when every conjugate is a root to within 2^-20.
    """
    if denominator_bound < 1:
        raise ValueError("denominator_bound must be positive")
    single = not isinstance(values, (list, tuple)) or (
        isinstance(values, (list, tuple))
        and len(values) == 2
        and not isinstance(values[0], (list, tuple))
        and E is not None
    )
    if not isinstance(values, (list, tuple)):
        vals = [values]
    elif single:
        vals = [tuple(values)]
    else:
        vals = list(values)

    with mp.workprec(precision_bits + 20):
        pairs = _as_pairs(vals)
        if pairs is not None and len(pairs) == 1:
            return _recognize_rational_point(pairs[0], denominator_bound, E)
        if pairs is not None and len(pairs) == 2 and E is not None:
            return _recognize_quadratic_point(pairs, denominator_bound, E)
        if pairs is None and len(vals) == 1:
            r, err = _round_rational(mp.mpc(vals[0]), denominator_bound)
            err += abs(mp.im(mp.mpc(vals[0])))
            if err > _RESIDUAL_CAP:
                raise RecognitionFailed(f"residual {mp.nstr(err, 5)} too large")
            return RecognizedAlgebraic(kind="rational", value=r, residual=err)
        xs = (
            [p[0] for p in pairs]
            if pairs is not None
            else [mp.mpc(v) for v in vals]
        )
        return _recognize_minpoly(xs, denominator_bound)


def _recognize_rational_point(pair, bound, E):
    x, y = pair
    rx, ex = _round_rational(x, bound)
    ry, ey = _round_rational(y, bound)
    residual = ex + ey + abs(mp.im(x)) + abs(mp.im(y))
    if residual > _RESIDUAL_CAP:
        raise RecognitionFailed(f"residual {mp.nstr(residual, 5)} too large")
    if E is not None:
        lhs = ry * ry + E.a1 * rx * ry + E.a3 * ry
        if lhs != E.rhs(rx):
            raise RecognitionFailed("rounded point misses the curve equation")
    return RecognizedAlgebraic(kind="rational", value=(rx, ry), residual=residual)


def _recognize_quadratic_point(pairs, bound, E):
    (x1, y1), (x2, y2) = pairs
    # symmetric functions are rational; recover x, y in Q(sqrt(d))
    sx, esx = _round_rational(x1 + x2, bound * bound)
    px, epx = _round_rational(x1 * x2, bound * bound)
    sy, esy = _round_rational(y1 + y2, bound * bound)
    py, epy = _round_rational(y1 * y2, bound * bound)
    residual = esx + epx + esy + epy
    # genuine algebraic inputs round to machine accuracy; a merely-small
    # residual (~bound^-4) signals a spurious continued-fraction hit and
    # would feed astronomically large integers to the factorization below
    strict = mp.mpf(2) ** (-(mp.prec // 2)) * (1 + abs(x1) + abs(y1)) ** 2
    if residual > max(strict, mp.mpf(2) ** (-(mp.prec - 30))):
        raise RecognitionFailed(f"residual {mp.nstr(residual, 5)} too large")
    disc_x = sx * sx - 4 * px
    if disc_x == 0:
        raise RecognitionFailed("conjugate x-values coincide; not quadratic")
    # d = squarefree kernel of the numerator*denominator of disc_x
    num = disc_x.numerator * disc_x.denominator
    d = 1
    for p, e in factorint(abs(num)).items():
        if e % 2:
            d *= p
    if num < 0:
        d = -d
    # x = sx/2 + b*sqrt(d) with b = sqrt(disc_x/d)/2
    bx = _frac_sqrt(disc_x / d)
    if bx is None:
        raise RecognitionFailed("x-discriminant is not d times a square")
    xq = QuadElt.make(sx / 2, bx / 2, d)
    # y = sy/2 + c*sqrt(d); c from matching y1 against the embedding of x
    disc_y = sy * sy - 4 * py
    if disc_y == 0:
        yq = QuadElt.make(sy / 2, Fraction(0), d)
    else:
        cy = _frac_sqrt(disc_y / d)
        if cy is None:
            raise RecognitionFailed("y lives in a different quadratic field")
        yq = QuadElt.make(sy / 2, cy / 2, d)
    # fix relative signs so (x1, y1) is one common embedding of (xq, yq)
    xq, yq, emb_err = _match_embedding(xq, yq, x1, y1, d)
    residual += emb_err
    if residual > _RESIDUAL_CAP:
        raise RecognitionFailed("no sign choice matches the numerical conjugates")
    if E is not None:
        lhs = yq * yq + E.a1 * xq * yq + E.a3 * yq
        rhs = xq * xq * xq + E.a2 * xq * xq + E.a4 * xq + E.a6
        if lhs != rhs:
            raise RecognitionFailed("quadratic point misses the curve equation")
    return RecognizedAlgebraic(kind="quadratic", value=(xq, yq), residual=residual)


def _frac_sqrt(f: Fraction) -> Fraction | None:
    if f < 0:
        return None
    n = _isqrt_exact(f.numerator)
    d = _isqrt_exact(f.denominator)
    if n is None or d is None:
        return None
    return Fraction(n, d)


def _isqrt_exact(n: int) -> int | None:
    import math

    r = math.isqrt(n)
    return r if r * r == n else None


def _embed_quad(v, prec: int) -> mpc:
    if isinstance(v, Fraction):
        return mp.mpf(v.numerator) / v.denominator
    with mp.workprec(prec):
        s = mp.sqrt(mp.mpc(v.d)) if v.d < 0 else mp.sqrt(mp.mpf(v.d))
        return (
            mp.mpf(v.x.numerator) / v.x.denominator
            + mp.mpf(v.y.numerator) / v.y.denominator * s
        )


def _match_embedding(xq, yq, x1, y1, d):
    prec = mp.prec
    best = None
    for sx in (1, -1):
        for sy in (1, -1):
            xc = _flip(xq, sx)
            yc = _flip(yq, sy)
            err = abs(_embed_quad(xc, prec) - x1) + abs(_embed_quad(yc, prec) - y1)
            if best is None or err < best[2]:
                best = (xc, yc, err)
    return best


def _flip(v, sign):
    if sign == 1 or isinstance(v, Fraction):
        return v
    return v.conjugate()


def _recognize_minpoly(xs, bound):
    # expand prod (X - x_i), round coefficients, clear denominators
    with mp.workprec(mp.prec + 20):
        coeffs = [mp.mpc(1)]
        for x in xs:
            nxt = [mp.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i] += c
                nxt[i + 1] -= c * x
            coeffs = nxt
        fracs = []
        residual = mp.mpf(0)
        for c in coeffs:
            r, err = _round_rational(c, bound)
            residual += err + abs(mp.im(c))
            fracs.append(r)
        if residual > _RESIDUAL_CAP:
            raise RecognitionFailed(f"residual {mp.nstr(residual, 5)} too large")
        import math

        lcm = 1
        for f in fracs:
            lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
        ints = [int(f * lcm) for f in fracs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if g > 1:
            ints = [v // g for v in ints]
        if ints[0] < 0:
            ints = [-v for v in ints]
        # confirm every conjugate is a root of the cleared polynomial
        worst = mp.mpf(0)
        scale = max(abs(v) for v in ints)
        for x in xs:
            val = mp.mpc(0)
            for c in ints:
                val = val * x + c
            worst = max(worst, abs(val) / scale)
        if worst > _RESIDUAL_CAP:
            raise RecognitionFailed(
                f"conjugates are not roots (residual {mp.nstr(worst, 5)})"
            )
        return RecognizedAlgebraic(
            kind="minpoly", value=tuple(ints), residual=max(residual, worst)
        )

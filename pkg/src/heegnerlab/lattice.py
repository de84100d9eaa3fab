"""Period lattices and the Weierstrass uniformization C/Lambda -> E(C).

Periods come from the AGM when the curve has three real 2-division values
and from tanh-sinh quadrature between the branch points otherwise.  The
Weierstrass functions are evaluated by the absolutely convergent q-series
in u = e^(2 pi i z / w1), after reducing z against a Gauss-reduced basis.
The elliptic logarithm inverts the map by coarse localization on the
fundamental parallelogram followed by a Newton precision ladder.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .ellcurve import CurveModel, CurvePoint, QuadElt
from .errors import IdentityPoint, PrecisionUnachievable

from fractions import Fraction


@dataclass(frozen=True)
class Lattice:
    omega1: mpc
    omega2: mpc
    precision_bits: int

    def basis(self) -> tuple[mpc, mpc]:
        return (self.omega1, self.omega2)

    def reduced_basis(self) -> tuple[mpc, mpc]:
        """Gauss-reduced basis (w1, w2) with Im(w2/w1) > 0 and |w2/w1|
        in the usual fundamental domain; used for series evaluation."""
        with mp.workprec(self.precision_bits):
            w1, w2 = self.omega1, self.omega2
            if abs(w2) < abs(w1):
                w1, w2 = w2, w1
            while True:
                n = mp.nint(mp.re(w2 / w1))
                w2 = w2 - n * w1
                if abs(w2) < abs(w1):
                    w1, w2 = w2, w1
                else:
                    break
            if mp.im(w2 / w1) < 0:
                w2 = -w2
            return (w1, w2)

    def coordinates(self, z: mpc) -> tuple[mpf, mpf]:
        """Real coordinates (s, t) with z = s*omega1 + t*omega2."""
        x1, y1 = mp.re(self.omega1), mp.im(self.omega1)
        x2, y2 = mp.re(self.omega2), mp.im(self.omega2)
        det = x1 * y2 - x2 * y1
        s = (mp.re(z) * y2 - mp.im(z) * x2) / det
        t = (x1 * mp.im(z) - y1 * mp.re(z)) / det
        return (s, t)

    def reduce(self, z: mpc) -> mpc:
        """Representative of z mod Lambda in the fundamental parallelogram
        [0,1) x [0,1) of the stated basis."""
        s, t = self.coordinates(z)
        return (s - mp.floor(s)) * self.omega1 + (t - mp.floor(t)) * self.omega2

    def distance(self, z: mpc) -> mpf:
        """Distance from z to the nearest lattice point."""
        return self.nearest_distances(z)[0]

    def nearest_distances(self, z: mpc) -> tuple[mpf, mpf]:
        """(nearest, second-nearest) distances from z to lattice points."""
        s, t = self.coordinates(z)
        s0, t0 = mp.nint(s), mp.nint(t)
        dists = []
        for ds in (-1, 0, 1):
            for dt in (-1, 0, 1):
                w = z - (s0 + ds) * self.omega1 - (t0 + dt) * self.omega2
                dists.append(abs(w))
        dists.sort()
        return (dists[0], dists[1])

    def contains(self, z: mpc, tol) -> bool:
        return self.distance(z) < tol


def _two_division_values(E: CurveModel, prec: int):
    # roots of 4t^3 - g2 t - g3, the 2-division values of the p-function
    c4, c6 = E.c_invariants
    with mp.workprec(prec):
        g2 = mpf(c4) / 12
        g3 = mpf(c6) / 216
        roots = mp.polyroots([4, 0, -g2, -g3], extraprec=prec // 2 + 40)
    return roots, g2, g3


def periods(E: CurveModel, precision_bits: int) -> Lattice:
    """Lattice of the invariant differential dx / (2y + a1 x + a3).

    Three real 2-division values (disc > 0): both periods by the AGM.
    Otherwise: real period by AGM-grade quadrature on [e1, inf), second
    period by quadrature between the conjugate branch points.
    """
    if not 53 <= precision_bits <= 1000:
        raise PrecisionUnachievable("precision_bits must be in 53..1000")
    work = precision_bits + 40
    roots, g2, g3 = _two_division_values(E, work)
    with mp.workprec(work):
        if E.discriminant > 0:
            es = sorted((mp.re(r) for r in roots), reverse=True)
            e1, e2, e3 = es
            w1 = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
            w2 = mp.mpc(0, 1) * mp.pi / mp.agm(
                mp.sqrt(e1 - e3), mp.sqrt(e2 - e3)
            )
        else:
            reals = [r for r in roots if abs(mp.im(r)) < mp.mpf(2) ** (-work // 2)]
            assert len(reals) == 1
            e1 = mp.re(reals[0])
            pair = [r for r in roots if abs(mp.im(r)) >= mp.mpf(2) ** (-work // 2)]
            p_re = mp.re(pair[0])
            q_im = abs(mp.im(pair[0]))

            # real period: 2 * int_{e1}^inf dt / sqrt(4(t-e1)((t-p)^2+q^2)),
            # desingularized by t = e1 + s^2.
            def f_real(s):
                return 1 / mp.sqrt((s * s + e1 - p_re) ** 2 + q_im**2)

            w1, err1 = mp.quad(
                f_real, [0, 1, 10, mp.inf], maxdegree=10, error=True
            )
            w1 *= 2

            # second generator: i * (AJ(e2) - AJ(e1)) along the straight
            # path t = e1 + lam*v, v = (p - e1) + i q.  There
            # (t-e1)(t-e2) = -lam(1-lam) v^2 and t - e3 stays in the right
            # half-plane, so every square root below is branch-continuous.
            # lam = sin(theta)^2 removes the endpoint singularities, leaving
            # an analytic integrand that Gauss-Legendre resolves fully.
            def f_conn(theta):
                lam = mp.sin(theta) ** 2
                w3 = (1 - lam) * (e1 - p_re) + mp.mpc(0, 1) * q_im * (1 + lam)
                return 2 / mp.sqrt(w3)

            w2, err2 = mp.quad(
                f_conn,
                [0, mp.pi / 2],
                method="gauss-legendre",
                maxdegree=12,
                error=True,
            )
            w2 *= mp.mpc(0, 1)
            if max(err1, err2) > mp.mpf(2) ** (-(precision_bits + 10)):
                raise PrecisionUnachievable(
                    "period quadrature did not reach the requested precision"
                )
        lat = Lattice(+w1, +w2, precision_bits)
        if mp.im(lat.omega2 / lat.omega1) < 0:
            lat = Lattice(lat.omega1, -lat.omega2, precision_bits)
        return lat


def _u_q(z: mpc, L: Lattice, prec: int) -> tuple[mpc, mpc, mpc]:
    # reduce z against the Gauss-reduced basis; return (u, q, w1_reduced)
    w1, w2 = L.reduced_basis()
    tau = w2 / w1
    x1, y1 = mp.re(w1), mp.im(w1)
    x2, y2 = mp.re(w2), mp.im(w2)
    det = x1 * y2 - x2 * y1
    s = (mp.re(z) * y2 - mp.im(z) * x2) / det
    t = (x1 * mp.im(z) - y1 * mp.re(z)) / det
    t -= mp.nint(t)
    s -= mp.nint(s)
    q = mp.exp(2j * mp.pi * tau)
    u = mp.exp(2j * mp.pi * (s + t * tau))
    return u, q, w1


def weierstrass_p(z: mpc, L: Lattice, prec: int) -> tuple[mpc, mpc]:
    """(p(z), p'(z)) for the lattice, by the q-series

      p(z) (w1/2 pi i)^2 = 1/12 + u/(1-u)^2
          + sum_{n>=1} [ q^n u/(1-q^n u)^2 + q^n/u /(1-q^n/u)^2 - 2 q^n/(1-q^n)^2 ]
    """
    u, q, w1 = _u_q(z, L, prec)
    tol = mp.mpf(2) ** (-prec - 10)
    one = mp.mpf(1)
    if abs(u - 1) < mp.mpf(2) ** (-prec // 2):
        raise IdentityPoint("z is a lattice point to working precision")
    s_p = one / 12 + u / (1 - u) ** 2
    s_dp = u * (1 + u) / (1 - u) ** 3
    qn = mp.mpc(1)
    n = 0
    while True:
        n += 1
        qn *= q
        a = qn * u
        b = qn / u
        term_p = a / (1 - a) ** 2 + b / (1 - b) ** 2 - 2 * qn / (1 - qn) ** 2
        term_dp = a * (1 + a) / (1 - a) ** 3 - b * (1 + b) / (1 - b) ** 3
        s_p += term_p
        s_dp += term_dp
        if abs(term_p) + abs(term_dp) < tol and n > 2:
            break
        if n > 10_000:
            raise PrecisionUnachievable("p-series did not converge")
    c = 2j * mp.pi / w1
    return (c**2 * s_p, c**3 * s_dp)


def weierstrass_map(z: mpc, E: CurveModel, L: Lattice) -> tuple[mpc, mpc]:
    """Complex point (x, y) on E corresponding to z mod Lambda."""
    prec = L.precision_bits
    with mp.workprec(prec + 20):
        p, dp = weierstrass_p(z, L, prec + 20)
        b2 = E.b_invariants[0]
        x = p - mpf(b2) / 12
        y = (dp - E.a1 * x - E.a3) / 2
        return (x, y)


def curve_equation_residual(E: CurveModel, x: mpc, y: mpc) -> mpf:
    return abs(
        y * y + E.a1 * x * y + E.a3 * y - (x**3 + E.a2 * x * x + E.a4 * x + E.a6)
    )


def embed(value, prec: int) -> mpc:
    """Fixed complex embedding of an exact coordinate: sqrt(d) maps to the
    principal square root (positive imaginary part for d < 0)."""
    with mp.workprec(prec):
        if isinstance(value, QuadElt):
            sq = mp.sqrt(mpc(value.d))
            return mpc(
                mpf(value.x.numerator) / value.x.denominator
            ) + mpc(mpf(value.y.numerator) / value.y.denominator) * sq
        if isinstance(value, Fraction):
            return mpc(mpf(value.numerator) / value.denominator)
        return mpc(value)


def elliptic_log(P: CurvePoint, E: CurveModel, L: Lattice) -> mpc:
    """z in the fundamental parallelogram with weierstrass_map(z) = P.

    Coarse grid localization at low precision, then a Newton ladder on
    p(z) = x + b2/12, sign fixed against p'(z) = 2y + a1 x + a3.
    """
    if P.is_infinity:
        raise ValueError("elliptic log of the identity is the lattice itself")
    prec = L.precision_bits
    b2 = E.b_invariants[0]
    with mp.workprec(prec + 20):
        xw = embed(P.x, prec + 20) + mpf(b2) / 12
        yw = 2 * embed(P.y, prec + 20) + E.a1 * embed(P.x, prec + 20) + E.a3
        hp = _half_period_log(xw, yw, L, prec + 20)
        if hp is not None:
            return L.reduce(hp)
        z = _invert_p(xw, L, prec + 20)
        # choose between z and -z via p'
        _, dp = weierstrass_p(z, L, prec + 20)
        if abs(dp - yw) > abs(-dp - yw):
            z = -z
        return L.reduce(z)


def complex_log_embedding(x: mpc, y: mpc, E: CurveModel, L: Lattice) -> mpc:
    """elliptic_log for a numerically given complex point (x, y)."""
    prec = L.precision_bits
    b2 = E.b_invariants[0]
    with mp.workprec(prec + 20):
        xw = x + mpf(b2) / 12
        yw = 2 * y + E.a1 * x + E.a3
        hp = _half_period_log(xw, yw, L, prec + 20)
        if hp is not None:
            return L.reduce(hp)
        z = _invert_p(xw, L, prec + 20)
        _, dp = weierstrass_p(z, L, prec + 20)
        if abs(dp - yw) > abs(-dp - yw):
            z = -z
        return L.reduce(z)


def _half_period_log(xw: mpc, yw: mpc, L: Lattice, prec: int) -> mpc | None:
    # 2-torsion sits at the half periods, where p' = 0 and Newton on p
    # degenerates; match x against p(half period) directly instead.
    if abs(yw) > mp.mpf(2) ** (-(prec - 20)) * (1 + abs(xw)):
        return None
    w1, w2 = L.reduced_basis()
    for hp in (w1 / 2, w2 / 2, (w1 + w2) / 2):
        p, _ = weierstrass_p(hp, L, prec)
        if abs(p - xw) < mp.mpf(2) ** (-(prec - 20)) * (1 + abs(xw)):
            return hp
    return None


def _invert_p(target: mpc, L: Lattice, prec: int) -> mpc:
    # localize p(z) = target on a coarse grid, refine by Newton doubling
    grid_prec = 60
    grid = _coarse_grid(L, grid_prec)
    with mp.workprec(grid_prec):
        best = sorted(((abs(p - target), z0) for p, z0 in grid),
                      key=lambda t: t[0])
    for _, z0 in best[:6]:
        z = _newton_ladder(z0, target, L, prec)
        if z is not None:
            return z
    raise PrecisionUnachievable("could not invert the Weierstrass function")


_GRID_CACHE: dict[tuple, tuple] = {}


def _coarse_grid(L: Lattice, grid_prec: int) -> tuple:
    # p-values on a 28x28 sample of the fundamental parallelogram; the grid
    # depends only on the lattice, so it is shared across inversions
    key = (str(L.omega1), str(L.omega2), grid_prec)
    cached = _GRID_CACHE.get(key)
    if cached is not None:
        return cached
    vals = []
    with mp.workprec(grid_prec):
        w1, w2 = L.reduced_basis()
        n = 28
        for i in range(1, n):
            for j in range(1, n):
                z0 = (mpf(i) / n) * w1 + (mpf(j) / n) * w2
                try:
                    p, _ = weierstrass_p(z0, L, grid_prec)
                except IdentityPoint:
                    continue
                vals.append((p, z0))
    if len(_GRID_CACHE) > 32:
        _GRID_CACHE.clear()
    _GRID_CACHE[key] = tuple(vals)
    return _GRID_CACHE[key]


def _newton_ladder(z0: mpc, target: mpc, L: Lattice, prec: int) -> mpc | None:
    cur = 60
    z = z0
    while True:
        cur = min(2 * cur, prec + 10)
        with mp.workprec(cur + 10):
            z = mpc(z)
            converged = False
            for _ in range(60):
                try:
                    p, dp = weierstrass_p(z, L, cur + 10)
                except IdentityPoint:
                    return None
                if abs(dp) == 0:
                    return None
                step = (p - target) / dp
                z = z - step
                if abs(step) < mp.mpf(2) ** (-cur):
                    converged = True
                    break
            if not converged:
                return None
        if cur >= prec + 10:
            with mp.workprec(prec + 10):
                p, _ = weierstrass_p(z, L, prec + 10)
                if abs(p - target) < mp.mpf(2) ** (-(prec - 20)) * (1 + abs(target)):
                    return z
            return None
